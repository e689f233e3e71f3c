#pragma once

#include <cstddef>
#include <string>

#include "bifirom/errors.hpp"

namespace bifirom {

// Structured quadrilateral grid on a rectangle. Elements are nx*ny axis
// aligned cells; nodes are (nx+1)*(ny+1). With homogeneous Dirichlet
// elimination one scalar field has (nx-1)*(ny-1) free (interior) nodes.
struct StructuredGrid {
    int nx = 0;
    int ny = 0;
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;

    double hx() const { return (x_hi - x_lo) / nx; }
    double hy() const { return (y_hi - y_lo) / ny; }

    std::size_t interior_nodes() const {
        return static_cast<std::size_t>(nx - 1) * static_cast<std::size_t>(ny - 1);
    }
    std::size_t total_nodes() const {
        return static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
    }

    double node_x(int ix) const { return x_lo + ix * hx(); }
    double node_y(int iy) const { return y_lo + iy * hy(); }

    // Interior node (ix, iy), 1 <= ix <= nx-1, 1 <= iy <= ny-1 -> dof index.
    std::size_t interior_index(int ix, int iy) const {
        return static_cast<std::size_t>(iy - 1) * (nx - 1) + (ix - 1);
    }

    void validate() const {
        if (nx < 1 || ny < 1) throw DomainError("grid: nx and ny must be >= 1");
        if (!(x_lo < x_hi) || !(y_lo < y_hi)) throw DomainError("grid: empty domain box");
    }
};

// Parses "128x128" style grid sizes.
StructuredGrid parse_grid(const std::string& text);

}  // namespace bifirom
