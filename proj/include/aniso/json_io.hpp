#pragma once

#include <string>

#include "aniso/linalg.hpp"
#include "aniso/sets.hpp"

namespace aniso {

/// Deterministic JSON text builder: fixed key order, every numeric field
/// printed with 17 significant digits, non-finite values as the string
/// sentinels "inf" / "-inf".
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long long v);
    JsonWriter& value(unsigned long long v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& raw(const std::string& fragment);
    JsonWriter& vector_value(const Vector& v);

    std::string str() const { return out_; }

  private:
    void separator();
    std::string out_;
    bool need_comma_ = false;
};

std::string format_double(double v);  // %.17g, or quoted "inf"/"-inf"/"nan"

/// {"matrix": [[...], ...]} row-major.
Matrix parse_matrix_json(const std::string& text);
SpdMatrix parse_spd_json(const std::string& text);
std::string matrix_to_json(const Matrix& m);

/// {"type":"halfspace"|"polytope"|"box"|"subgraph", ...}; extended reals
/// appear as "inf"/"-inf" strings.
SetRegion parse_set_json(const std::string& text);
std::string set_to_json(const SetRegion& e);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace aniso
