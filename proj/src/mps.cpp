#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "drayage/lp.hpp"

namespace drayage::lp {

namespace {

std::string field_name(const std::string& label, char prefix, int index) {
    std::string name = label;
    if (name.empty()) name = prefix + std::to_string(index);
    if (name.size() > 8) name.resize(8);
    for (char& c : name) {
        if (c == ' ' || c == '\t') c = '_';
    }
    return name;
}

void entry(std::ostream& os, const std::string& a, const std::string& b, double v) {
    os << "    " << std::left << std::setw(10) << a << std::setw(10) << b << std::right
       << std::setw(12) << std::setprecision(6) << v << "\n";
}

} // namespace

void write_mps(const LinearProgram& program, std::ostream& os) {
    os << "NAME          " << program.name << "\n";
    os << "ROWS\n";
    os << " N  COST\n";
    for (int r = 0; r < program.num_rows(); ++r) {
        char sense = 'L';
        if (program.senses[r] == Sense::Equal) sense = 'E';
        if (program.senses[r] == Sense::GreaterEqual) sense = 'G';
        os << " " << sense << "  " << field_name(program.row_labels[r], 'R', r) << "\n";
    }
    os << "COLUMNS\n";
    for (int j = 0; j < program.num_vars(); ++j) {
        const std::string col = field_name(program.col_labels[j], 'C', j);
        if (program.objective[j] != 0.0) entry(os, col, "COST", program.objective[j]);
        for (int r = 0; r < program.num_rows(); ++r) {
            const auto& row = program.rows[r];
            for (std::size_t k = 0; k < row.cols.size(); ++k) {
                if (row.cols[k] == j) {
                    entry(os, col, field_name(program.row_labels[r], 'R', r), row.vals[k]);
                }
            }
        }
    }
    os << "RHS\n";
    for (int r = 0; r < program.num_rows(); ++r) {
        if (program.rhs[r] != 0.0) {
            entry(os, "RHS", field_name(program.row_labels[r], 'R', r), program.rhs[r]);
        }
    }
    os << "BOUNDS\n";
    for (int j = 0; j < program.num_vars(); ++j) {
        const std::string col = field_name(program.col_labels[j], 'C', j);
        if (program.lower[j] != 0.0) {
            os << " LO " << std::left << std::setw(10) << "BND" << std::setw(10) << col
               << std::right << std::setw(12) << program.lower[j] << "\n";
        }
        if (std::isfinite(program.upper[j])) {
            os << " UP " << std::left << std::setw(10) << "BND" << std::setw(10) << col
               << std::right << std::setw(12) << program.upper[j] << "\n";
        }
    }
    os << "ENDATA\n";
}

} // namespace drayage::lp
