#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fieldsim/errors.hpp"
#include "fieldsim/units.hpp"

namespace fieldsim {

/// Regular 3-D grid with physical spacing in meters. Site linear index is
/// ix + nx*(iy + ny*iz), x-fastest; this layout is a file-format contract.
/// Sites are cell-centered: site (ix,iy,iz) sits at ((ix+0.5)dx, ...).
struct Mesh {
    int nx = 1, ny = 1, nz = 1;
    double dx = 1.0, dy = 1.0, dz = 1.0;

    Mesh() = default;
    Mesh(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_);

    std::size_t site_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    std::size_t flatten(int ix, int iy, int iz) const {
        return static_cast<std::size_t>(ix) +
               static_cast<std::size_t>(nx) * (static_cast<std::size_t>(iy) +
                                               static_cast<std::size_t>(ny) * iz);
    }
    std::array<int, 3> unflatten(std::size_t site) const {
        int ix = static_cast<int>(site % nx);
        std::size_t rest = site / nx;
        int iy = static_cast<int>(rest % ny);
        int iz = static_cast<int>(rest / ny);
        return {ix, iy, iz};
    }
    std::array<double, 3> site_center(std::size_t site) const {
        auto [ix, iy, iz] = unflatten(site);
        return {(ix + 0.5) * dx, (iy + 0.5) * dy, (iz + 0.5) * dz};
    }
    double cell_volume() const { return dx * dy * dz; }

    bool operator==(const Mesh&) const = default;
};

/// Named per-site tensor data over a mesh: rank 0 (1 component) or
/// rank 1 (always 3 components). Storage is contiguous, component-fastest.
class Field {
public:
    Field(std::string name, int rank, const Mesh& mesh, Dimension unit);

    const std::string& name() const { return name_; }
    int rank() const { return rank_; }
    int components() const { return comps_; }
    const Mesh& mesh() const { return mesh_; }
    const Dimension& unit() const { return unit_; }

    double at(std::size_t site, int c) const { return data_[site * comps_ + c]; }
    double& at(std::size_t site, int c) { return data_[site * comps_ + c]; }
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    /// Set every site to the same component tuple.
    void fill(std::span<const double> component_values);

    /// Copy a full data vector (length N * components) in layout order.
    void assign(std::span<const double> all_values);

    /// Evaluate f at every cell center; f must return `components` values.
    void set_from_function(
        const std::function<std::vector<double>(double x, double y, double z)>& f);

    std::vector<double> average() const;
    double max_norm() const;

    /// Snapshot format: one '#' header line, then one line per site with
    /// the component values at 17 significant digits, in layout order.
    void save(std::ostream& os) const;
    void save(const std::string& path) const;
    static Field load(std::istream& is);
    static Field load(const std::string& path);

private:
    std::string name_;
    int rank_;
    int comps_;
    Mesh mesh_;
    Dimension unit_;
    std::vector<double> data_;
};

/// Fields over one shared mesh, unique names. Ordered by name so that
/// every iteration order (and everything derived from it) is stable.
class FieldSet {
public:
    explicit FieldSet(const Mesh& mesh) : mesh_(mesh) {}

    const Mesh& mesh() const { return mesh_; }

    Field& add(const std::string& name, int rank, Dimension unit = {});
    Field& at(const std::string& name);
    const Field& at(const std::string& name) const;
    bool contains(const std::string& name) const;

    auto begin() const { return fields_.begin(); }
    auto end() const { return fields_.end(); }
    std::size_t size() const { return fields_.size(); }

private:
    Mesh mesh_;
    std::map<std::string, Field> fields_;
};

} // namespace fieldsim
