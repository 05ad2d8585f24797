#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "agmcs/io.hpp"
#include "oracle.hpp"

using namespace agmcs;

namespace {

std::string fixture(const std::string& name) { return std::string(AGMCS_FIXTURE_DIR) + "/" + name; }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("agmcs_test_io_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(MatrixJson, RealRoundTripIsExact) {
  auto rng = make_rng(3);
  const auto m = random_gaussian<double>(3, 4, rng);
  const json j = matrix_to_json(m);
  EXPECT_EQ(j["rows"], 3);
  EXPECT_EQ(j["cols"], 4);
  EXPECT_EQ(j["field"], "real");
  EXPECT_EQ(j["data"].size(), 12u);
  const auto back = matrix_from_json(json::parse(j.dump()));
  EXPECT_EQ(std::get<RealMatrix>(back), m);
}

TEST(MatrixJson, ComplexRoundTripIsExact) {
  auto rng = make_rng(4);
  const auto m = random_gaussian<cplx>(2, 2, rng);
  const json j = matrix_to_json(m);
  EXPECT_EQ(j["data"][0].size(), 2u);
  EXPECT_EQ(std::get<ComplexMatrix>(matrix_from_json(json::parse(j.dump()))), m);
}

TEST(MatrixJson, RejectsMalformed) {
  const auto good = matrix_to_json(RealMatrix::identity(2));
  for (const char* key : {"rows", "cols", "field", "data"}) {
    json bad = good;
    bad.erase(key);
    EXPECT_THROW(matrix_from_json(bad), ParseError) << key;
  }
  json short_data = good;
  short_data["data"].erase(0);
  EXPECT_THROW(matrix_from_json(short_data), ParseError);
  json bad_field = good;
  bad_field["field"] = "quaternion";
  EXPECT_THROW(matrix_from_json(bad_field), ParseError);
  json bad_entry = good;
  bad_entry["data"][1] = "x";
  try {
    matrix_from_json(bad_entry, "A");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("A.data[1]"), std::string::npos);
  }
  json bad_complex = matrix_to_json(ComplexMatrix::identity(2));
  bad_complex["data"][0] = json::array({1.0});
  EXPECT_THROW(matrix_from_json(bad_complex), ParseError);
}

TEST(InstanceJson, RoundTripAndKeys) {
  Instance inst;
  inst.pair = std::pair{RealMatrix::identity(2), RealMatrix::diagonal({2.0, 3.0})};
  inst.q = 0.25;
  inst.k = 1;
  const json j = instance_to_json(inst);
  EXPECT_TRUE(j.contains("A"));
  EXPECT_TRUE(j.contains("B"));
  const auto back = instance_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.field(), FieldKind::real);
  EXPECT_EQ(back.dim(), 2u);
  EXPECT_FALSE(back.factors);
  EXPECT_EQ(*back.q, 0.25);
  EXPECT_EQ(*back.k, 1u);
  EXPECT_EQ(instance_to_json(back).dump(), j.dump());
}

TEST(InstanceJson, FactorsAndMixedFields) {
  json j;
  j["X"] = matrix_to_json(RealMatrix::identity(2));
  j["Y"] = matrix_to_json(ComplexMatrix::identity(2));
  const auto inst = instance_from_json(j);
  EXPECT_TRUE(inst.factors);
  EXPECT_EQ(inst.field(), FieldKind::complex);
}

TEST(InstanceJson, ShapeErrors) {
  json j;
  j["A"] = matrix_to_json(RealMatrix::identity(2));
  j["B"] = matrix_to_json(RealMatrix::identity(3));
  EXPECT_THROW(instance_from_json(j), ParseError);
  j["B"] = matrix_to_json(RealMatrix(2, 3));
  EXPECT_THROW(instance_from_json(j), ParseError);
  j.erase("B");
  EXPECT_THROW(instance_from_json(j), ParseError);
  EXPECT_THROW(instance_from_json(json::array()), ParseError);
}

TEST(InstanceJson, FileErrorsCarryPathAndLine) {
  const auto path = temp_path("broken.json");
  {
    std::ofstream out(path);
    out << "{\n  \"A\": {\"rows\": 1,\n  oops\n}\n";
  }
  try {
    load_instance(path);
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(path), std::string::npos);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
  EXPECT_THROW(load_instance(temp_path("does_not_exist.json")), ParseError);
  std::remove(path.c_str());
}

TEST(InstanceJson, WriteIsByteStable) {
  auto rng = make_rng(8);
  Instance inst;
  inst.pair = std::pair{random_psd<cplx>(3, 2, rng).matrix(), random_psd<cplx>(3, 3, rng).matrix()};
  const auto p1 = temp_path("w1.json");
  const auto p2 = temp_path("w2.json");
  write_json_file(p1, instance_to_json(inst));
  write_json_file(p2, instance_to_json(load_instance(p1)));
  EXPECT_EQ(slurp(p1), slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST(ReportJson, RoundTrip) {
  InstanceDigest d;
  d.n = 3;
  d.field = FieldKind::complex;
  d.q = 0.3;
  d.k = 2;
  d.phi = "schatten:1.5";
  d.seed = 7;
  d.index = 11;
  const auto r = make_report("theorem2", 1.5, 1.25, 1e-9, d);
  const auto back = report_from_json(json::parse(report_to_json(r).dump()));
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.lhs, r.lhs);
  EXPECT_EQ(back.margin, r.margin);
  EXPECT_FALSE(back.holds);
  EXPECT_EQ(back.instance.field, FieldKind::complex);
  EXPECT_EQ(*back.instance.phi, "schatten:1.5");
  EXPECT_EQ(*back.instance.index, 11u);
  EXPECT_EQ(report_to_json(back).dump(), report_to_json(r).dump());
}

TEST(TraceJson, HasStepsAndMatrices) {
  auto rng = make_rng(3);
  const auto a = random_psd<double>(4, 4, rng);
  const auto b = random_psd<double>(4, 4, rng);
  const auto out = run_pipeline(a, b, 0.25, 2);
  const auto& tr = std::get<PipelineTrace<double>>(out);
  const json j = trace_to_json(tr);
  EXPECT_EQ(j["steps"].size(), tr.steps.size());
  EXPECT_TRUE(j["all_gates_pass"].get<bool>());
  for (const char* m : {"P", "B_prime", "A_prime", "Z", "X", "Y"}) EXPECT_TRUE(j["matrices"].contains(m)) << m;
  EXPECT_EQ(j["steps"][0]["name"], "normalize");
}

// The committed regression fixture: a false-variant counterexample that must
// keep failing, re-verified both by the library and by an Eigen SVD.
TEST(FalseVariantFixture, ReverifiesWithinTolerance) {
  const json j = parse_json_file(fixture("false_variant_violation.json"));
  const auto v = violation_from_json(j);
  EXPECT_EQ(v.target, Target::false_variant);
  EXPECT_LT(v.report.margin, -1e-6);
  const auto again = recheck(v);
  EXPECT_FALSE(again.holds);
  EXPECT_NEAR(again.margin, v.report.margin, 1e-12);
  EXPECT_NEAR(again.lhs, v.report.lhs, 1e-12);
  EXPECT_NEAR(again.rhs, v.report.rhs, 1e-12);

  const auto& pr = std::get<std::pair<RealMatrix, RealMatrix>>(v.instance);
  const double q = *v.report.instance.q;
  const std::size_t k = *v.report.instance.k;
  const RealMatrix c1 = pr.first * q + pr.second * (1 - q);
  const RealMatrix c2 = pr.first * (1 - q) + pr.second * q;
  const double lhs = oracle::singular_values(RealMatrix(pr.first * pr.second))[k - 1];
  const double rhs = oracle::singular_values(RealMatrix(c1 * c2))[k - 1];
  EXPECT_NEAR(rhs - lhs, v.report.margin, 1e-12);
  EXPECT_LT(rhs - lhs, -1e-6);
}

TEST(ViolationJson, IsAlsoAnInstance) {
  const json j = parse_json_file(fixture("false_variant_violation.json"));
  const auto inst = instance_from_json(j);
  EXPECT_FALSE(inst.factors);
  ASSERT_TRUE(inst.q);
  ASSERT_TRUE(inst.k);
  EXPECT_EQ(violation_to_json(violation_from_json(j)).dump(), [&] {
    json copy = j;
    copy.erase("provenance");
    return copy.dump();
  }());
}
