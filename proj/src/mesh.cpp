#include "fieldsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fieldsim {

Mesh::Mesh(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_)
    : nx(nx_), ny(ny_), nz(nz_), dx(dx_), dy(dy_), dz(dz_) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw ShapeMismatch("mesh extents must be positive, got " + std::to_string(nx) + "x" +
                            std::to_string(ny) + "x" + std::to_string(nz));
    if (!(dx > 0) || !(dy > 0) || !(dz > 0) || !std::isfinite(dx) || !std::isfinite(dy) ||
        !std::isfinite(dz))
        throw ShapeMismatch("mesh spacings must be positive and finite");
}

Field::Field(std::string name, int rank, const Mesh& mesh, Dimension unit)
    : name_(std::move(name)), rank_(rank), comps_(rank == 0 ? 1 : 3), mesh_(mesh),
      unit_(unit), data_(mesh.site_count() * (rank == 0 ? 1 : 3), 0.0) {
    if (rank != 0 && rank != 1)
        throw ShapeMismatch("field rank must be 0 or 1, got " + std::to_string(rank));
}

void Field::fill(std::span<const double> component_values) {
    if (component_values.size() != static_cast<std::size_t>(comps_))
        throw ShapeMismatch("fill: expected " + std::to_string(comps_) + " values, got " +
                            std::to_string(component_values.size()));
    const std::size_t n = mesh_.site_count();
    for (std::size_t s = 0; s < n; ++s)
        for (int c = 0; c < comps_; ++c) data_[s * comps_ + c] = component_values[c];
}

void Field::assign(std::span<const double> all_values) {
    if (all_values.size() != data_.size())
        throw ShapeMismatch("assign: expected " + std::to_string(data_.size()) +
                            " values, got " + std::to_string(all_values.size()));
    std::copy(all_values.begin(), all_values.end(), data_.begin());
}

void Field::set_from_function(
    const std::function<std::vector<double>(double, double, double)>& f) {
    const std::size_t n = mesh_.site_count();
    for (std::size_t s = 0; s < n; ++s) {
        auto [x, y, z] = mesh_.site_center(s);
        std::vector<double> v = f(x, y, z);
        if (v.size() != static_cast<std::size_t>(comps_))
            throw ShapeMismatch("field '" + name_ + "': initializer returned " +
                                std::to_string(v.size()) + " values, expected " +
                                std::to_string(comps_));
        for (int c = 0; c < comps_; ++c) data_[s * comps_ + c] = v[c];
    }
}

std::vector<double> Field::average() const {
    std::vector<double> mean(comps_, 0.0);
    const std::size_t n = mesh_.site_count();
    for (std::size_t s = 0; s < n; ++s)
        for (int c = 0; c < comps_; ++c) mean[c] += data_[s * comps_ + c];
    for (int c = 0; c < comps_; ++c) mean[c] /= static_cast<double>(n);
    return mean;
}

double Field::max_norm() const {
    double best = 0.0;
    const std::size_t n = mesh_.site_count();
    for (std::size_t s = 0; s < n; ++s) {
        double sq = 0.0;
        for (int c = 0; c < comps_; ++c) {
            double v = data_[s * comps_ + c];
            sq += v * v;
        }
        best = std::max(best, sq);
    }
    return std::sqrt(best);
}

void Field::save(std::ostream& os) const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "# field=%s rank=%d nx=%d ny=%d nz=%d dx=%.17g dy=%.17g dz=%.17g unit=%s\n",
                  name_.c_str(), rank_, mesh_.nx, mesh_.ny, mesh_.nz, mesh_.dx, mesh_.dy,
                  mesh_.dz, unit_.str().c_str());
    os << buf;
    const std::size_t n = mesh_.site_count();
    for (std::size_t s = 0; s < n; ++s) {
        for (int c = 0; c < comps_; ++c) {
            std::snprintf(buf, sizeof(buf), c == 0 ? "%.17g" : " %.17g", data_[s * comps_ + c]);
            os << buf;
        }
        os << '\n';
    }
}

void Field::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    save(os);
}

Field Field::load(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.empty() || header[0] != '#')
        throw ParseError("field snapshot: missing header line");

    auto grab = [&](const std::string& key) -> std::string {
        std::string tag = " " + key + "=";
        auto pos = header.find(tag);
        if (pos == std::string::npos)
            throw ParseError("field snapshot: header missing '" + key + "'");
        pos += tag.size();
        auto end = header.find(' ', pos);
        if (end == std::string::npos) end = header.size();
        return header.substr(pos, end - pos);
    };

    std::string name = grab("field");
    int rank = std::stoi(grab("rank"));
    Mesh mesh(std::stoi(grab("nx")), std::stoi(grab("ny")), std::stoi(grab("nz")),
              std::stod(grab("dx")), std::stod(grab("dy")), std::stod(grab("dz")));
    // unit is the trailing key; its canonical form may contain spaces
    std::string unit_tag = " unit=";
    auto upos = header.find(unit_tag);
    if (upos == std::string::npos) throw ParseError("field snapshot: header missing 'unit'");
    Dimension unit = Dimension::parse(header.substr(upos + unit_tag.size()));

    Field f(name, rank, mesh, unit);
    const std::size_t n = mesh.site_count();
    for (std::size_t s = 0; s < n; ++s) {
        std::string line;
        if (!std::getline(is, line))
            throw ParseError("field snapshot: truncated at site " + std::to_string(s));
        std::istringstream ls(line);
        for (int c = 0; c < f.components(); ++c)
            if (!(ls >> f.at(s, c)))
                throw ParseError("field snapshot: bad value at site " + std::to_string(s));
    }
    return f;
}

Field Field::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    return load(is);
}

Field& FieldSet::add(const std::string& name, int rank, Dimension unit) {
    if (fields_.contains(name)) throw DuplicateName("field '" + name + "' already exists");
    auto [it, ok] = fields_.emplace(name, Field(name, rank, mesh_, unit));
    (void)ok;
    return it->second;
}

Field& FieldSet::at(const std::string& name) {
    auto it = fields_.find(name);
    if (it == fields_.end()) throw UnknownField("no field named '" + name + "'");
    return it->second;
}

const Field& FieldSet::at(const std::string& name) const {
    auto it = fields_.find(name);
    if (it == fields_.end()) throw UnknownField("no field named '" + name + "'");
    return it->second;
}

bool FieldSet::contains(const std::string& name) const { return fields_.contains(name); }

} // namespace fieldsim
