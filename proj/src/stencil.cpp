#include "fieldsim/stencil.hpp"

#include "fieldsim/errors.hpp"

#include <cmath>

namespace fieldsim::stencil {

LaplacianOp::LaplacianOp(const Mesh& m) : mesh(&m) {
    inv_dx2 = 1.0 / (m.dx * m.dx);
    inv_dy2 = 1.0 / (m.dy * m.dy);
    inv_dz2 = 1.0 / (m.dz * m.dz);
    if (!std::isfinite(inv_dx2) || !std::isfinite(inv_dy2) || !std::isfinite(inv_dz2))
        throw NonFiniteValue("mesh spacing too small for Laplacian weights");
}

void laplacian_apply(const LaplacianOp& op, const Field& input, Field& output) {
    const Mesh& m = *op.mesh;
    if (!(input.mesh() == m) || !(output.mesh() == m))
        throw MeshMismatch("Laplacian operands must share the operator's mesh");
    if (input.rank() != output.rank())
        throw MeshMismatch("Laplacian input rank " + std::to_string(input.rank()) +
                           " vs output rank " + std::to_string(output.rank()));
    if (&input == &output)
        throw AliasedOutput("Laplacian output must be a distinct field");

    const int nc = input.components();
    const double* in = input.data().data();
    double* out = output.data().data();

    const std::size_t sx = static_cast<std::size_t>(nc);
    const std::size_t sy = sx * m.nx;
    const std::size_t sz = sy * m.ny;

    for (int iz = 0; iz < m.nz; ++iz) {
        for (int iy = 0; iy < m.ny; ++iy) {
            for (int ix = 0; ix < m.nx; ++ix) {
                const std::size_t at =
                    static_cast<std::size_t>(ix) * sx + static_cast<std::size_t>(iy) * sy +
                    static_cast<std::size_t>(iz) * sz;
                for (int c = 0; c < nc; ++c) {
                    const double u = in[at + c];
                    double acc = 0.0;
                    if (m.nx > 1) {
                        const double lo = ix > 0 ? in[at + c - sx] : u;
                        const double hi = ix < m.nx - 1 ? in[at + c + sx] : u;
                        acc += (lo - 2.0 * u + hi) * op.inv_dx2;
                    }
                    if (m.ny > 1) {
                        const double lo = iy > 0 ? in[at + c - sy] : u;
                        const double hi = iy < m.ny - 1 ? in[at + c + sy] : u;
                        acc += (lo - 2.0 * u + hi) * op.inv_dy2;
                    }
                    if (m.nz > 1) {
                        const double lo = iz > 0 ? in[at + c - sz] : u;
                        const double hi = iz < m.nz - 1 ? in[at + c + sz] : u;
                        acc += (lo - 2.0 * u + hi) * op.inv_dz2;
                    }
                    out[at + c] = acc;
                }
            }
        }
    }
}

} // namespace fieldsim::stencil
