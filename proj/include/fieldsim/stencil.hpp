#pragma once

#include "fieldsim/mesh.hpp"

namespace fieldsim::stencil {

// 7-point finite-difference Laplacian on a regular mesh with zero-flux
// (Neumann) boundaries: the out-of-range neighbor mirrors the boundary
// cell itself, so the face contribution is (u(nbr) - u)/h^2.
// Axes with a single cell contribute nothing.
struct LaplacianOp {
    explicit LaplacianOp(const Mesh& mesh);

    const Mesh* mesh;
    double inv_dx2, inv_dy2, inv_dz2;
};

// output <- laplacian(input), componentwise. Input and output must live on
// the same mesh, have the same rank, and be distinct fields.
void laplacian_apply(const LaplacianOp& op, const Field& input, Field& output);

} // namespace fieldsim::stencil
