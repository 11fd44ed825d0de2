#include "exitgame/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace exitgame {

Grid Grid::regular(const BoxBounds& box, const std::vector<int>& nodes) {
    if (static_cast<int>(nodes.size()) != box.dim()) {
        throw ConfigError("grid: node counts must match box dimension");
    }
    Grid g;
    g.dim = box.dim();
    g.nodes = nodes;
    g.origin = box.lo;
    g.spacing.resize(g.dim);
    for (int i = 0; i < g.dim; ++i) {
        if (nodes[i] < 2) throw ConfigError("grid: need at least 2 nodes per axis");
        g.spacing[i] = (box.hi[i] - box.lo[i]) / (nodes[i] - 1);
        if (!(g.spacing[i] > 0.0)) throw ConfigError("grid: spacing must be positive");
    }
    return g;
}

std::size_t Grid::total() const {
    std::size_t t = 1;
    for (int n : nodes) t *= static_cast<std::size_t>(n);
    return t;
}

std::size_t Grid::index(const std::vector<int>& mi) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * nodes[i] + mi[i];
    return idx;
}

std::vector<int> Grid::multi_index(std::size_t idx) const {
    std::vector<int> mi(dim);
    for (int i = dim - 1; i >= 0; --i) {
        mi[i] = static_cast<int>(idx % nodes[i]);
        idx /= nodes[i];
    }
    return mi;
}

Vec Grid::coords(std::size_t idx) const {
    Vec x(dim);
    coords_into(idx, x.data());
    return x;
}

void Grid::coords_into(std::size_t idx, double* out) const {
    for (int i = dim - 1; i >= 0; --i) {
        const int mi = static_cast<int>(idx % nodes[i]);
        idx /= nodes[i];
        out[i] = origin[i] + spacing[i] * mi;
    }
}

double Grid::min_spacing() const {
    return *std::min_element(spacing.begin(), spacing.end());
}

BoxBounds Grid::box() const {
    BoxBounds b{origin, origin};
    for (int i = 0; i < dim; ++i) b.hi[i] = origin[i] + spacing[i] * (nodes[i] - 1);
    return b;
}

bool Grid::on_edge(std::size_t idx) const {
    for (int i = dim - 1; i >= 0; --i) {
        const int mi = static_cast<int>(idx % nodes[i]);
        idx /= nodes[i];
        if (mi == 0 || mi == nodes[i] - 1) return true;
    }
    return false;
}

std::vector<NodeClass> classify(const Grid& grid, const DomainGeometry& geo) {
    std::vector<NodeClass> classes(grid.total());
    Vec x(grid.dim);
    for (std::size_t idx = 0; idx < classes.size(); ++idx) {
        grid.coords_into(idx, x.data());
        const bool in1 = geo.m1.contains(x);
        const bool in2 = geo.m2.contains(x);
        if (in1 && in2) {
            throw ConfigError("classify: node " + std::to_string(idx) +
                              " lies in both M1 and M2; d(M1,M2) > 0 is violated");
        }
        if (in1) classes[idx] = NodeClass::Target;
        else if (in2) classes[idx] = NodeClass::Lifeline;
        else if (grid.on_edge(idx)) classes[idx] = NodeClass::BoxEdge;
        else classes[idx] = NodeClass::Interior;
    }
    return classes;
}

double ValueField::interpolate(const double* x) const {
    const int d = grid.dim;
    int base[8];
    double t[8];
    std::size_t stride[8];
    std::size_t s = 1;
    for (int i = d - 1; i >= 0; --i) {
        stride[i] = s;
        s *= grid.nodes[i];
    }
    for (int i = 0; i < d; ++i) {
        const double rel = (x[i] - grid.origin[i]) / grid.spacing[i];
        if (rel < -1e-12 || rel > grid.nodes[i] - 1 + 1e-12) return 1.0;
        int c = static_cast<int>(std::floor(rel));
        c = std::clamp(c, 0, grid.nodes[i] - 2);
        base[i] = c;
        t[i] = std::clamp(rel - c, 0.0, 1.0);
    }
    double acc = 0.0;
    const int corners = 1 << d;
    for (int m = 0; m < corners; ++m) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i) {
            const int bit = (m >> i) & 1;
            w *= bit ? t[i] : (1.0 - t[i]);
            idx += stride[i] * (base[i] + bit);
        }
        if (w != 0.0) acc += w * values[idx];
    }
    return std::clamp(acc, 0.0, 1.0);
}

double ValueField::interpolate(ConstSpan x) const {
    return interpolate(x.data());
}

std::vector<double> extract_phi(const ValueField& vf) {
    std::vector<double> phi(vf.values.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = kruzhkov_inv(vf.values[i]);
    return phi;
}

void write_value_csv(const ValueField& vf, std::ostream& os) {
    os << "# exitgame-valuefield v1\n";
    os << "# dim=" << vf.grid.dim << " nodes=";
    for (int i = 0; i < vf.grid.dim; ++i) os << (i ? "," : "") << vf.grid.nodes[i];
    os << " origin=";
    for (int i = 0; i < vf.grid.dim; ++i) os << (i ? "," : "") << fmt17(vf.grid.origin[i]);
    os << " spacing=";
    for (int i = 0; i < vf.grid.dim; ++i) os << (i ? "," : "") << fmt17(vf.grid.spacing[i]);
    os << "\n";
    char hashbuf[24];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(vf.scenario_hash));
    os << "# scenario=" << hashbuf << " residual=" << fmt17(vf.residual)
       << " iterations=" << vf.iterations << "\n";
    for (int i = 0; i < vf.grid.dim; ++i) os << "x" << (i + 1) << ",";
    os << "u\n";
    Vec x(vf.grid.dim);
    for (std::size_t idx = 0; idx < vf.values.size(); ++idx) {
        vf.grid.coords_into(idx, x.data());
        for (int i = 0; i < vf.grid.dim; ++i) os << fmt17(x[i]) << ",";
        os << fmt17(vf.values[idx]) << "\n";
    }
}

void write_value_csv(const ValueField& vf, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_value_csv(vf, os);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

std::string meta_value(const std::string& line, const std::string& key) {
    const auto pos = line.find(key + "=");
    if (pos == std::string::npos)
        throw std::runtime_error("valuefield csv: missing metadata key " + key);
    const auto start = pos + key.size() + 1;
    const auto end = line.find(' ', start);
    return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

ValueField read_value_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.find("exitgame-valuefield") == std::string::npos)
        throw std::runtime_error("valuefield csv: bad magic line");
    if (!std::getline(is, line)) throw std::runtime_error("valuefield csv: truncated header");

    ValueField vf;
    vf.grid.dim = std::stoi(meta_value(line, "dim"));
    for (const auto& tok : split(meta_value(line, "nodes"), ','))
        vf.grid.nodes.push_back(std::stoi(tok));
    for (const auto& tok : split(meta_value(line, "origin"), ','))
        vf.grid.origin.push_back(std::stod(tok));
    for (const auto& tok : split(meta_value(line, "spacing"), ','))
        vf.grid.spacing.push_back(std::stod(tok));

    if (!std::getline(is, line)) throw std::runtime_error("valuefield csv: truncated header");
    vf.scenario_hash = std::stoull(meta_value(line, "scenario"), nullptr, 16);
    vf.residual = std::stod(meta_value(line, "residual"));
    vf.iterations = std::stoi(meta_value(line, "iterations"));

    std::getline(is, line);  // column header
    vf.values.reserve(vf.grid.total());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto pos = line.rfind(',');
        vf.values.push_back(std::stod(line.substr(pos + 1)));
    }
    if (vf.values.size() != vf.grid.total()) {
        throw std::runtime_error("valuefield csv: row count does not match grid");
    }
    return vf;
}

ValueField read_value_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_value_csv(is);
}

}  // namespace exitgame
