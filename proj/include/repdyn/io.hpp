#pragma once

#include <map>
#include <string>
#include <vector>

#include "repdyn/dynamics.hpp"
#include "repdyn/solver.hpp"

namespace repdyn {

// 12 significant digits, locale-independent.
std::string format_sig12(double x);
// Shortest round-trip-exact representation.
std::string format_exact(double x);

void write_text_file(const std::string& path, const std::string& content);

// Equilibrium table: header
// pi,sStar,rho,piRec1,piRec0,effort,pS,jPlus,jMinus,piPlus,piMinus,clamped
// with values at 12 significant digits; clamped is 0 interior, 1 low, 2 high.
std::string equilibrium_csv(const EquilibriumSolution& sol);

// Path table: header rep,t,pi,omega,s,a,y,piNext (round-trip-exact reals).
std::string paths_csv(const PathEnsemble& ens);

// Loads an equilibrium CSV produced by equilibrium_csv (used by verify).
struct EquilibriumRow {
    double pi, s_star, rho, pi_rec1, pi_rec0, effort, p_s, j_plus, j_minus, pi_plus,
        pi_minus;
    int clamped;
};
std::vector<EquilibriumRow> load_equilibrium_csv(const std::string& path);

}  // namespace repdyn
