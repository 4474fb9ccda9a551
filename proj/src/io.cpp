#include "bsphere/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>

#include "bsphere/errors.hpp"

namespace bsphere::io {

namespace {

static_assert(std::endian::native == std::endian::little, "binary matrix I/O assumes a little-endian host");

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode | std::ios::out | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode | std::ios::in);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

template <class T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
    T value;
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError(path + ": truncated matrix file");
    return value;
}

}  // namespace

nlohmann::json read_json(const std::string& path) {
    auto in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json snake_to_json(const ContourPair& h) {
    return {{"n", h.n}, {"seed", h.seed}, {"f", h.f}, {"g", h.g}};
}

ContourPair snake_from_json(const nlohmann::json& j) {
    ContourPair h;
    try {
        h.n = j.at("n").get<int>();
        h.seed = j.value("seed", std::uint64_t{0});
        h.f = j.at("f").get<std::vector<double>>();
        h.g = j.at("g").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("snake JSON: ") + e.what());
    }
    validate(h);
    return h;
}

void write_snake(const std::string& path, const ContourPair& h) {
    auto out = open_out(path);
    out << snake_to_json(h).dump() << '\n';
    if (!out) throw IoError("write failed: " + path);
}

ContourPair read_snake(const std::string& path) { return snake_from_json(read_json(path)); }

void write_matrix(const std::string& path, const DistanceMatrix& d) {
    auto out = open_out(path, std::ios::binary);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d.m));
    for (int p : d.points) put<std::uint32_t>(out, static_cast<std::uint32_t>(p));
    for (int i = 0; i < d.m; ++i)
        for (int j = i + 1; j < d.m; ++j) put<double>(out, d(i, j));
    if (!out) throw IoError("write failed: " + path);
}

DistanceMatrix read_matrix(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    DistanceMatrix d;
    d.m = static_cast<int>(get<std::uint32_t>(in, path));
    if (d.m < 1 || d.m > (1 << 20)) throw IoError(path + ": implausible matrix size");
    d.points.resize(d.m);
    for (int& p : d.points) p = static_cast<int>(get<std::uint32_t>(in, path));
    d.values.assign(static_cast<std::size_t>(d.m) * d.m, 0.0);
    for (int i = 0; i < d.m; ++i)
        for (int j = i + 1; j < d.m; ++j) d(i, j) = d(j, i) = get<double>(in, path);
    if (in.peek() != std::char_traits<char>::eof()) throw IoError(path + ": trailing bytes after matrix");
    return d;
}

void write_matrix_csv(const std::string& path, const DistanceMatrix& d) {
    auto out = open_out(path);
    out.precision(17);
    out << "point";
    for (int p : d.points) out << ',' << p;
    out << '\n';
    for (int i = 0; i < d.m; ++i) {
        out << d.points[i];
        for (int j = 0; j < d.m; ++j) out << ',' << d(i, j);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json marks_to_json(const MarkedSphereSample& s) {
    nlohmann::json j = {{"i0", s.i0}, {"i1", s.i1}, {"mass", s.mass}};
    if (s.epsilon) j["epsilon"] = *s.epsilon;
    return j;
}

MarkedSphereSample marked_from(DistanceMatrix d, const nlohmann::json& marks) {
    MarkedSphereSample s;
    try {
        s.i0 = marks.at("i0").get<int>();
        s.i1 = marks.at("i1").get<int>();
        s.mass = marks.contains("mass") ? marks["mass"].get<std::vector<double>>()
                                        : std::vector<double>(d.m, 1.0 / d.m);
        if (marks.contains("epsilon")) s.epsilon = marks["epsilon"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("marks JSON: ") + e.what());
    }
    if (static_cast<int>(s.mass.size()) != d.m) throw IoError("marks JSON: mass length differs from matrix size");
    if (s.i0 < 0 || s.i0 >= d.m || s.i1 < 0 || s.i1 >= d.m) throw IoError("marks JSON: marked index out of range");
    s.dist = std::move(d);
    return s;
}

nlohmann::json map_to_json(const cvs::Quadrangulation& q) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& h : q.half_edges) edges.push_back({{"opp", h.opp}, {"next", h.next}});
    return {{"half_edges", edges}, {"root", q.root}, {"pointed", q.pointed}};
}

cvs::Quadrangulation map_from_json(const nlohmann::json& j) {
    cvs::Quadrangulation q;
    try {
        for (const auto& e : j.at("half_edges")) q.half_edges.push_back({e.at("opp").get<int>(), e.at("next").get<int>()});
        q.root = j.at("root").get<int>();
        q.pointed = j.at("pointed").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("map JSON: ") + e.what());
    }
    return q;
}

nlohmann::json tree_to_json(const cvs::LabeledPlaneTree& t) {
    std::function<nlohmann::json(int)> node = [&](int v) {
        nlohmann::json out = nlohmann::json::array({t.label[v]});
        for (int c : t.children[v]) out.push_back(node(c));
        return out;
    };
    return node(0);
}

cvs::LabeledPlaneTree tree_from_json(const nlohmann::json& j) {
    std::vector<bool> dyck;
    std::vector<int> inc;
    std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& node) {
        if (!node.is_array() || node.empty() || !node[0].is_number_integer())
            throw IoError("tree JSON: a vertex must be [label, children...]");
        const int label = node[0].get<int>();
        for (std::size_t c = 1; c < node.size(); ++c) {
            if (!node[c].is_array() || node[c].empty() || !node[c][0].is_number_integer())
                throw IoError("tree JSON: a vertex must be [label, children...]");
            dyck.push_back(true);
            inc.push_back(node[c][0].get<int>() - label);
            walk(node[c]);
            dyck.push_back(false);
        }
    };
    walk(j);
    if (j[0].get<int>() != 0) throw IoError("tree JSON: root label must be 0");
    auto t = cvs::tree_from_dyck(dyck, inc);
    cvs::validate(t);
    return t;
}

}  // namespace bsphere::io
