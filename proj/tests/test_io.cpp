#include <string>

#include "doctest.h"
#include "genjac/io.hpp"
#include "support.hpp"

using namespace testing;

namespace {

std::string message_of(auto&& f, ErrorCode expected) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("no error thrown");
  return {};
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("curve files") {
    const auto c = load_curve(std::string(GENJAC_FIXTURES) + "/quintic.json");
    CHECK(c.genus() == 2);
    CHECK(c.coefficients().size() == 6);
    const auto j = parse_json(R"({"coefficients": [[0, 0], -1, [0, 0], [1, 0]], "label": "c"})", "inline");
    CHECK(curve_from_json(j).label() == "c");
  }

  TEST_CASE("syntax errors cite line and column") {
    const std::string msg = message_of([] { load_curve(std::string(GENJAC_FIXTURES) + "/bad_syntax.json"); },
                                       ErrorCode::InvalidInput);
    CHECK(msg.find("line") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }

  TEST_CASE("field errors name the field") {
    const std::string msg = message_of([] { load_curve(std::string(GENJAC_FIXTURES) + "/bad_field.json"); },
                                       ErrorCode::InvalidInput);
    CHECK(msg.find("coefficients[2]") != std::string::npos);
    message_of([] { curve_from_json(parse_json(R"({"label": "x"})", "inline")); }, ErrorCode::InvalidInput);
    message_of([] { load_curve("/nonexistent/curve.json"); }, ErrorCode::Io);
    message_of([] { load_curve(std::string(GENJAC_FIXTURES) + "/singular.json"); }, ErrorCode::SingularCurve);
  }

  TEST_CASE("place specs") {
    const auto c = cubic();
    const Place p = parse_place_spec(c, "0.5,0.4,+");
    CHECK(std::abs(p.x - cplx(0.5, 0.4)) == 0.0);
    CHECK(sheet_of(c, p) == "+");
    CHECK(sheet_of(c, parse_place_spec(c, "-0.6,0.7,-")) == "-");
    message_of([&] { parse_place_spec(c, "0.5,0.4"); }, ErrorCode::InvalidInput);
    message_of([&] { parse_place_spec(c, "0.5,abc,+"); }, ErrorCode::InvalidInput);
    message_of([&] { parse_place_spec(c, "0.5,0.4,*"); }, ErrorCode::InvalidInput);
  }

  TEST_CASE("divisors and points") {
    const auto c = cubic();
    const Divisor d = load_divisor(c, std::string(GENJAC_FIXTURES) + "/roundtrip_g1n2.divisor.json");
    REQUIRE(d.size() == 2);
    CHECK(sheet_of(c, d[1]) == "-");
    CHECK(load_divisor(c, std::string(GENJAC_FIXTURES) + "/empty.divisor.json").empty());
    const VectorXc z = zhat_from_json(parse_json(R"({"z": [[1, 2]], "Z": [[3, 4]]})", "inline"), 2);
    CHECK(z[1] == cplx(3.0, 4.0));
    message_of([] { zhat_from_json(parse_json(R"({"zhat": [[1, 2]]})", "inline"), 2); }, ErrorCode::InvalidInput);
  }

  TEST_CASE("json round trip of complex data and csv layout") {
    VectorXc v(2);
    v << cplx(1.5, -2.0), cplx(0.0, 3.25);
    const json j = {{"zhat", to_json(v)}};
    CHECK((zhat_from_json(parse_json(dump(j), "dump"), 2) - v).norm() == 0.0);
    const auto c = cubic();
    InversionResult r;
    r.divisor = {c.place({0.5, 0.4}, 1)};
    r.multiplicities = {1};
    const std::string csv = inversion_csv(c, r);
    CHECK(csv.rfind("x_re,x_im,sheet,multiplicity\n", 0) == 0);
    CHECK(csv.find(",+,1") != std::string::npos);
  }
}
