#pragma once

#include "lvpp/mesh.hpp"

namespace lvpp {

// Discrete inf-sup constant of the (P1-bubble, P0-broken) pair with homogeneous Dirichlet
// conditions: the smallest ||w||_{-1,V_h} / ||w||_{-1} over P0 fields w, where the H^{-1}
// norm is approximated with P1 on the mesh refined `refinements` times.
double discrete_inf_sup(const Mesh& mesh, int refinements = 2);

} // namespace lvpp
