#include "doctest.h"

#include <cmath>
#include <limits>

#include "bmc/error.hpp"
#include "bmc/io.hpp"

using namespace bmc;

TEST_SUITE("io") {
TEST_CASE("vector round trip") {
  auto fem = make_fem1d_uniform(1.0, 3, 1.5, Boundary::DirichletLeftNeumannRight);
  BanachVector v(fem, {0, 0.1, -1.0 / 3, 2.5e-17});
  BanachVector w = vector_from_json(vector_to_json(v));
  CHECK(same_space(v.space(), w.space()));
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == w[i]);

  auto hold = make_holder_uniform(2.0, 4, 0.25, 2);
  BanachVector h(hold, std::vector<double>(10, 0.7));
  CHECK(vector_to_json(vector_from_json(vector_to_json(h))) == vector_to_json(h));
}

TEST_CASE("tensor round trip") {
  auto sp = make_sequence_space(3, 3.0);
  SymmetricTensorRep U(3, sp);
  U.add(0.5, BanachVector(sp, {1, 2, 3}));
  U.add(-1e-300, BanachVector(sp, {0, 0, 1}));
  auto V = tensor_from_json(tensor_to_json(U));
  CHECK(V.k() == 3);
  CHECK(V.rank() == 2);
  CHECK(std::equal(U.matrix().begin(), U.matrix().end(), V.matrix().begin()));
  CHECK(std::equal(U.weights().begin(), U.weights().end(), V.weights().begin()));
}

TEST_CASE("malformed input is a config error") {
  try {
    tensor_from_json("{\"k\": 2");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  CHECK_THROWS_AS(vector_from_json("{\"kind\": \"SequenceLp\"}"), Error);
}

TEST_CASE("doubles print in shortest round-trip form") {
  for (double x : {0.1, 1.0 / 3, 1e-300, 123456789.0, -2.5}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("norm report and plan json") {
  std::string csv = norm_report_csv({{"eps_s", 2.0, false, 32, "1/2"}});
  CHECK(csv == "norm_kind,value,exact_flag,restarts,seed\neps_s,2,0,32,1/2\n");

  AllocatorInputs in;
  for (int l = 1; l <= 10; ++l) in.N.push_back(std::ldexp(1.0, l));
  auto js = plan_to_json(allocate(in));
  CHECK(js.find("\"regime\"") != std::string::npos);
  CHECK(js.find("beta_dominant") != std::string::npos);
}
}
