#include "repdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace repdyn {

std::string format_sig12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format_exact(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string equilibrium_csv(const EquilibriumSolution& sol) {
    std::string out =
        "pi,sStar,rho,piRec1,piRec0,effort,pS,jPlus,jMinus,piPlus,piMinus,clamped\n";
    for (const auto& pt : sol.points) {
        const auto& b = pt.branch;
        const int clamped = pt.clamped_low ? 1 : (pt.clamped_high ? 2 : 0);
        out += format_sig12(pt.pi) + ',' + format_sig12(pt.cutoff) + ',' +
               format_sig12(pt.rho) + ',' + format_sig12(b.pi_rec1) + ',' +
               format_sig12(b.pi_rec0) + ',' + format_sig12(b.effort) + ',' +
               format_sig12(b.success_prob) + ',' + format_sig12(b.j_plus) + ',' +
               format_sig12(b.j_minus) + ',' + format_sig12(b.pi_plus) + ',' +
               format_sig12(b.pi_minus) + ',' + std::to_string(clamped) + '\n';
    }
    return out;
}

std::string paths_csv(const PathEnsemble& ens) {
    std::string out = "rep,t,pi,omega,s,a,y,piNext\n";
    for (std::size_t rep = 0; rep < ens.replications.size(); ++rep) {
        const auto& path = ens.replications[rep];
        for (std::size_t t = 0; t < path.size(); ++t) {
            const auto& st = path[t];
            out += std::to_string(rep) + ',' + std::to_string(t) + ',' +
                   format_exact(st.pi) + ',' + std::to_string(st.omega) + ',' +
                   format_exact(st.signal) + ',' + std::to_string(st.action) + ',' +
                   std::to_string(st.outcome) + ',' + format_exact(st.pi_next) + '\n';
        }
    }
    return out;
}

std::vector<EquilibriumRow> load_equilibrium_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    if (line.rfind("pi,sStar,rho,", 0) != 0) {
        throw std::runtime_error("unexpected header in " + path);
    }
    std::vector<EquilibriumRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 12) throw std::runtime_error("bad row in " + path + ": " + line);
        EquilibriumRow r{vals[0], vals[1], vals[2], vals[3], vals[4],  vals[5],
                         vals[6], vals[7], vals[8], vals[9], vals[10], static_cast<int>(vals[11])};
        rows.push_back(r);
    }
    return rows;
}

}  // namespace repdyn
