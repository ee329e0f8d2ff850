#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "genjac/inversion.hpp"

namespace genjac {

using json = nlohmann::ordered_json;

// Reads a whole file; throws Io if it cannot be opened.
std::string read_file(const std::string& path);
// Writes to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

// Parses JSON text; syntax errors cite the line and column.
json parse_json(const std::string& text, const std::string& source);

// {"coefficients": [[re, im], ...], "label": "..."} with ascending degree.
HyperellipticCurve curve_from_json(const json& j, const std::string& source = "curve");
HyperellipticCurve load_curve(const std::string& path);

// "x_re,x_im,sheet" with sheet + (principal root) or - (its negative).
Place parse_place_spec(const HyperellipticCurve& curve, const std::string& spec);
// "+" if p.y is the principal square root of f(p.x), else "-".
std::string sheet_of(const HyperellipticCurve& curve, const Place& p);

// [[x_re, x_im, "+"], ...].
Divisor divisor_from_json(const HyperellipticCurve& curve, const json& j, const std::string& source = "divisor");
Divisor load_divisor(const HyperellipticCurve& curve, const std::string& path);

// Either {"zhat": [...]} or {"z": [...], "Z": [...]}, entries [re, im].
VectorXc zhat_from_json(const json& j, int dim, const std::string& source = "zhat");

json to_json(cplx v);
json to_json(const VectorXc& v);
json to_json(const MatrixXc& m);
json place_json(const HyperellipticCurve& curve, const Place& p);
json inversion_json(const HyperellipticCurve& curve, const InversionResult& r);
// x_re,x_im,sheet,multiplicity rows with a header.
std::string inversion_csv(const HyperellipticCurve& curve, const InversionResult& r);

// Indented dump with a trailing newline.
std::string dump(const json& j);

}  // namespace genjac
