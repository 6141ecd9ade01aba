#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "gridtopo/datagen.hpp"
#include "gridtopo/errors.hpp"
#include "gridtopo/io.hpp"
#include "helpers.hpp"

using namespace gridtopo;
using testutil::quick_sim;
using testutil::TempDir;

namespace {

void put(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("fmt_full emits the shortest text that round-trips exactly") {
  CHECK(fmt_full(1.0) == "1");
  CHECK(fmt_full(0.5) == "0.5");
  CHECK(fmt_full(-0.1) == "-0.1");
  CHECK(fmt_full(0.0) == "0");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x = unit(rng) * std::pow(10.0, static_cast<int>(rng() % 17) - 8);
    const double back = std::stod(fmt_full(x));
    CHECK(back == x);
  }
}

TEST_CASE("case files round-trip bitwise") {
  TempDir dir("case");
  LineList lines;
  lines.m = 5;  // one isolated bus beyond the largest index
  lines.lines = {{1, 2, 0.123456789012345, 1.75},
                 {2, 3, 0.0, 0.6000000000000001},
                 {3, 4, 1e-300, 2.0}};
  const std::string path = dir.file("case.csv");
  write_case(path, lines);
  const LineList back = read_case(path);
  CHECK(back.m == 5);
  REQUIRE(back.lines.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.lines[i].from == lines.lines[i].from);
    CHECK(back.lines[i].to == lines.lines[i].to);
    CHECK(back.lines[i].g_line == lines.lines[i].g_line);
    CHECK(back.lines[i].b_tilde_line == lines.lines[i].b_tilde_line);
  }
}

TEST_CASE("case files: bus count pinning and schema rejection") {
  TempDir dir("case_bad");
  const std::string path = dir.file("case.csv");

  put(path, "from_bus,to_bus,g_line,b_tilde_line\n1,2,0.5,1.0\n2,3,0.5,1.0\n");
  CHECK(read_case(path).m == 3);  // inferred from the largest index

  put(path, "# buses: 2\nfrom_bus,to_bus,g_line,b_tilde_line\n1,3,0.5,1.0\n");
  CHECK_THROWS_AS(read_case(path), schema_error);  // declared count too small

  put(path, "1,2,0.5,1.0\n");
  CHECK_THROWS_AS(read_case(path), schema_error);  // header missing

  put(path, "from,to,g,b\n1,2,0.5,1.0\n");
  CHECK_THROWS_AS(read_case(path), schema_error);  // wrong header

  put(path, "from_bus,to_bus,g_line,b_tilde_line\n1,2,0.5\n");
  CHECK_THROWS_AS(read_case(path), schema_error);  // short row

  put(path, "from_bus,to_bus,g_line,b_tilde_line\n1,2,abc,1.0\n");
  CHECK_THROWS_AS(read_case(path), schema_error);  // non-numeric field

  CHECK_THROWS_AS(read_case(dir.file("nope.csv")), schema_error);
}

TEST_CASE("matrix CSV round-trips bitwise and rejects bad shapes") {
  TempDir dir("mat");
  const std::string path = dir.file("a.csv");
  Matrix a(2, 3);
  a << 1.0, -0.25, 3.333333333333333, 1e-17, -7.0, 0.0;
  write_matrix_csv(path, a);
  const Matrix back = read_matrix_csv(path);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  CHECK(back == a);

  put(path, "1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(path), schema_error);
  put(path, "# only a comment\n");
  CHECK_THROWS_AS(read_matrix_csv(path), schema_error);
}

TEST_CASE("measurement files round-trip bitwise for every model") {
  TempDir dir("meas");
  const ComplexAdmittance adm = testutil::random_admittance(4, 3, 1);
  for (ModelKind kind : {ModelKind::AC, ModelKind::DLPF, ModelKind::DC}) {
    const MeasurementSet meas = quick_sim(adm, kind, 5, 20.0, 2).meas;
    const std::string path = dir.file("m_" + to_string(kind) + ".csv");
    write_measurements(path, meas);
    const MeasurementSet back = read_measurements(path);
    CHECK(back.model_kind == kind);
    CHECK(back.m == meas.m);
    CHECK(back.n_samples == meas.n_samples);
    for (int n = 0; n < meas.n_samples; ++n) {
      CHECK(back.p[n] == meas.p[n]);
      if (kind != ModelKind::DC) CHECK(back.q[n] == meas.q[n]);
      if (kind == ModelKind::AC)
        for (int i = 0; i < meas.m; ++i) {
          CHECK(back.v[n](i).real() == meas.v[n](i).real());
          CHECK(back.v[n](i).imag() == meas.v[n](i).imag());
        }
      if (kind == ModelKind::DLPF) CHECK(back.v_mag[n] == meas.v_mag[n]);
      if (kind != ModelKind::AC) CHECK(back.theta[n] == meas.theta[n]);
    }
  }
}

TEST_CASE("measurement files: schema rejection") {
  TempDir dir("meas_bad");
  const std::string path = dir.file("m.csv");
  const std::string header = "n,bus,p,q,v_re,v_im,v_mag,theta\n";

  put(path, "");
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // empty file

  put(path, "n,bus,p\n0,1,1.0\n");
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // wrong header

  put(path, header);
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // no rows

  put(path, header + "0,1,1.0,,1.0,0.0,,\n0,2,1.0,,1.0,0.0,,\n1,1,1.0,,1.0,0.0,,\n");
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // sample 1 misses bus 2

  put(path, header + "0,1,1.0,,,,,\n");
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // no voltage columns

  put(path, header + "0,1,1.0,0.5,1.0,0.0,,\n0,2,1.0,,1.0,0.0,,\n");
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // q present then absent

  put(path, header + "0,0,1.0,,1.0,0.0,,\n");
  CHECK_THROWS_AS(read_measurements(path), schema_error);  // bus indices are 1-based
}
