#include "genjac/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace genjac {

namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& field, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, source + ": field '" + field + "': " + what);
}

cplx complex_from_json(const json& j, const std::string& source, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    field_error(source, field, "expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

int sheet_from_token(const std::string& s, const std::string& source, const std::string& field) {
  if (s == "+" || s == "+1" || s == "1") return 1;
  if (s == "-" || s == "-1" || s == "−") return -1;
  field_error(source, field, "sheet must be + or -, got '" + s + "'");
}

Place make_place(const HyperellipticCurve& curve, cplx x, int sheet, const std::string& source,
                 const std::string& field) {
  if (curve.distance_to_branch(x) <= 1e-12 * (1.0 + std::abs(x))) return {x, 0.0};
  try {
    return curve.place(x, sheet);
  } catch (const Error& e) {
    field_error(source, field, e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::InvalidInput,
                source + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
}

HyperellipticCurve curve_from_json(const json& j, const std::string& source) {
  if (!j.is_object()) field_error(source, "<root>", "expected an object");
  if (!j.contains("coefficients")) field_error(source, "coefficients", "missing");
  const json& c = j["coefficients"];
  if (!c.is_array()) field_error(source, "coefficients", "expected a list");
  std::vector<cplx> coeffs;
  for (std::size_t i = 0; i < c.size(); ++i)
    coeffs.push_back(complex_from_json(c[i], source, "coefficients[" + std::to_string(i) + "]"));
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) field_error(source, "label", "expected a string");
    label = j["label"].get<std::string>();
  }
  return HyperellipticCurve::from_coefficients(std::move(coeffs), std::move(label));
}

HyperellipticCurve load_curve(const std::string& path) {
  return curve_from_json(parse_json(read_file(path), path), path);
}

Place parse_place_spec(const HyperellipticCurve& curve, const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw Error(ErrorCode::InvalidInput, "place '" + spec + "': expected x_re,x_im,sheet");
  double re = 0.0, im = 0.0;
  try {
    std::size_t a = 0, b = 0;
    re = std::stod(parts[0], &a);
    im = std::stod(parts[1], &b);
    if (a != parts[0].size() || b != parts[1].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "place '" + spec + "': bad number");
  }
  const int sheet = sheet_from_token(parts[2], "place '" + spec + "'", "sheet");
  return make_place(curve, {re, im}, sheet, "place '" + spec + "'", "x");
}

std::string sheet_of(const HyperellipticCurve& curve, const Place& p) {
  if (curve.distance_to_branch(p.x) <= 1e-12 * (1.0 + std::abs(p.x))) return "+";
  const cplx r = curve.sheets_at(p.x).first;
  return std::abs(p.y - r) <= std::abs(p.y + r) ? "+" : "-";
}

Divisor divisor_from_json(const HyperellipticCurve& curve, const json& j, const std::string& source) {
  const json& list = j.is_object() && j.contains("divisor") ? j["divisor"] : j;
  if (!list.is_array()) field_error(source, "<root>", "expected a list of [x_re, x_im, sheet]");
  Divisor d;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string field = "[" + std::to_string(i) + "]";
    const json& e = list[i];
    if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number())
      field_error(source, field, "expected [x_re, x_im, sheet]");
    std::string s;
    if (e[2].is_string()) s = e[2].get<std::string>();
    else if (e[2].is_number_integer()) s = std::to_string(e[2].get<int>());
    else field_error(source, field + "[2]", "sheet must be \"+\" or \"-\"");
    d.push_back(make_place(curve, {e[0].get<double>(), e[1].get<double>()}, sheet_from_token(s, source, field),
                           source, field));
  }
  return d;
}

Divisor load_divisor(const HyperellipticCurve& curve, const std::string& path) {
  return divisor_from_json(curve, parse_json(read_file(path), path), path);
}

VectorXc zhat_from_json(const json& j, int dim, const std::string& source) {
  auto read_list = [&](const json& l, const std::string& field) {
    if (!l.is_array()) field_error(source, field, "expected a list of [re, im]");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < l.size(); ++i)
      out.push_back(complex_from_json(l[i], source, field + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (!j.is_object()) field_error(source, "<root>", "expected an object");
  std::vector<cplx> v;
  if (j.contains("zhat")) {
    v = read_list(j["zhat"], "zhat");
  } else if (j.contains("z")) {
    v = read_list(j["z"], "z");
    if (j.contains("Z")) {
      const auto Z = read_list(j["Z"], "Z");
      v.insert(v.end(), Z.begin(), Z.end());
    }
  } else {
    field_error(source, "zhat", "missing (give zhat, or z and Z)");
  }
  if (static_cast<int>(v.size()) != dim)
    field_error(source, "zhat", "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
  VectorXc out(dim);
  for (int i = 0; i < dim; ++i) out[i] = v[i];
  return out;
}

json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

json to_json(const VectorXc& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

json to_json(const MatrixXc& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(VectorXc(m.row(i).transpose())));
  return out;
}

json place_json(const HyperellipticCurve& curve, const Place& p) {
  return json::array({p.x.real(), p.x.imag(), sheet_of(curve, p)});
}

json inversion_json(const HyperellipticCurve& curve, const InversionResult& r) {
  json j;
  json d = json::array();
  for (const auto& p : r.divisor) d.push_back(place_json(curve, p));
  j["divisor"] = d;
  j["y"] = json::array();
  for (const auto& p : r.divisor) j["y"].push_back(to_json(p.y));
  j["multiplicities"] = r.multiplicities;
  j["residual"] = r.residual;
  j["zero_count_certificate"] = r.zero_count_certificate;
  j["lattice_residual"] = r.lattice_residual;
  j["merged"] = r.merged;
  j["base_point_removed"] = r.base_point_removed;
  j["boxes"] = r.boxes;
  j["search_halfwidth"] = r.halfwidth;
  return j;
}

std::string inversion_csv(const HyperellipticCurve& curve, const InversionResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "x_re,x_im,sheet,multiplicity\n";
  for (std::size_t i = 0; i < r.divisor.size(); ++i)
    out << r.divisor[i].x.real() << ',' << r.divisor[i].x.imag() << ',' << sheet_of(curve, r.divisor[i]) << ','
        << r.multiplicities[i] << '\n';
  return out.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace genjac
