#include "aniso/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace aniso {

namespace {
using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (v == kInf) return "\"inf\"";
    if (v == -kInf) return "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void JsonWriter::separator() {
    if (need_comma_) out_ += ',';
    need_comma_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    separator();
    out_ += '{';
    return *this;
}
JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::begin_array() {
    separator();
    out_ += '[';
    return *this;
}
JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::key(const std::string& k) {
    separator();
    out_ += '"';
    out_ += k;
    out_ += "\":";
    return *this;
}
JsonWriter& JsonWriter::value(double v) {
    separator();
    out_ += format_double(v);
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::value(int v) { return value(static_cast<long long>(v)); }
JsonWriter& JsonWriter::value(long long v) {
    separator();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::value(unsigned long long v) {
    separator();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::value(const std::string& v) {
    separator();
    out_ += '"';
    out_ += v;
    out_ += '"';
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::raw(const std::string& fragment) {
    separator();
    out_ += fragment;
    need_comma_ = true;
    return *this;
}
JsonWriter& JsonWriter::vector_value(const Vector& v) {
    begin_array();
    for (double x : v) value(x);
    return end_array();
}

namespace {

double parse_extended(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw InputError("expected a number or \"inf\"/\"-inf\"");
}

Vector parse_vector(const json& j) {
    if (!j.is_array()) throw InputError("expected an array of numbers");
    Vector v;
    for (const json& x : j) v.push_back(parse_extended(x));
    return v;
}

Matrix parse_matrix_obj(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw InputError("ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

}  // namespace

Matrix parse_matrix_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("matrix")) throw InputError("matrix file needs a \"matrix\" key");
    return parse_matrix_obj(j["matrix"]);
}

SpdMatrix parse_spd_json(const std::string& text) { return spd_from_entries(parse_matrix_json(text)); }

std::string matrix_to_json(const Matrix& m) {
    JsonWriter w;
    w.begin_object().key("matrix").begin_array();
    for (int i = 0; i < m.rows(); ++i) {
        w.begin_array();
        for (int j = 0; j < m.cols(); ++j) w.value(m(i, j));
        w.end_array();
    }
    w.end_array().end_object();
    return w.str();
}

SetRegion parse_set_json(const std::string& text) {
    json j = json::parse(text);
    const std::string type = j.value("type", "");
    if (type == "halfspace") {
        return SetRegion(HalfSpaceSet(Direction(parse_vector(j.at("omega"))), parse_extended(j.at("t"))));
    }
    if (type == "polytope") {
        std::vector<Constraint> cons;
        for (const json& c : j.at("constraints"))
            cons.push_back({Direction(parse_vector(c.at("omega"))), parse_extended(c.at("t"))});
        if (j.contains("witness"))
            return SetRegion(PolytopeSet(std::move(cons), parse_vector(j["witness"]), 1 << 12));
        return SetRegion(PolytopeSet::from_constraints(std::move(cons), 1 << 12));
    }
    if (type == "box") {
        return SetRegion(BoxSet(parse_vector(j.at("lo")), parse_vector(j.at("hi"))));
    }
    if (type == "subgraph") {
        const json& grid = j.at("grid");
        std::vector<int> nodes;
        for (const json& x : grid.at("nodes")) nodes.push_back(x.get<int>());
        std::vector<double> heights;
        for (const json& x : j.at("heights")) heights.push_back(parse_extended(x));
        std::vector<bool> sides;
        for (const json& x : j.at("sides")) sides.push_back(x.get<bool>());
        return SetRegion(SubgraphRegion(Rotation(parse_matrix_obj(j.at("rotation"))),
                                        parse_vector(grid.at("lo")), parse_vector(grid.at("hi")),
                                        std::move(nodes), std::move(heights), std::move(sides)));
    }
    throw InputError("set \"type\" must be halfspace, polytope, box, or subgraph");
}

std::string set_to_json(const SetRegion& e) {
    JsonWriter w;
    if (const auto* h = e.as_halfspace()) {
        w.begin_object().key("type").value(std::string("halfspace"));
        w.key("omega").vector_value(h->omega().components());
        w.key("t").value(h->t());
        w.end_object();
        return w.str();
    }
    if (const auto* p = e.as_polytope()) {
        w.begin_object().key("type").value(std::string("polytope"));
        w.key("constraints").begin_array();
        for (const Constraint& c : p->constraints()) {
            w.begin_object().key("omega").vector_value(c.omega.components());
            w.key("t").value(c.t).end_object();
        }
        w.end_array();
        w.key("witness").vector_value(p->witness());
        w.end_object();
        return w.str();
    }
    if (const auto* b = e.as_box()) {
        w.begin_object().key("type").value(std::string("box"));
        w.key("lo").vector_value(b->lo());
        w.key("hi").vector_value(b->hi());
        w.end_object();
        return w.str();
    }
    const SubgraphRegion* s = e.as_subgraph();
    w.begin_object().key("type").value(std::string("subgraph"));
    w.key("grid").begin_object();
    w.key("lo").vector_value(s->base_lo());
    w.key("hi").vector_value(s->base_hi());
    w.key("nodes").begin_array();
    for (int k : s->nodes()) w.value(k);
    w.end_array().end_object();
    w.key("heights").begin_array();
    for (double h : s->heights()) w.value(h);
    w.end_array();
    w.key("rotation").begin_array();
    for (int i = 0; i < s->dim(); ++i) {
        w.begin_array();
        for (int j = 0; j < s->dim(); ++j) w.value(s->rotation().entries()(i, j));
        w.end_array();
    }
    w.end_array();
    w.key("sides").begin_array();
    for (int ax = 0; ax < s->base_dim(); ++ax)
        for (int side = 0; side < 2; ++side) w.value(s->side_is_true_boundary(ax, side));
    w.end_array();
    w.end_object();
    return w.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << contents;
}

}  // namespace aniso
