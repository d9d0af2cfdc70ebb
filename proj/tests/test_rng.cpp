#include <doctest.h>

#include <cmath>
#include <vector>

#include "adaexp/rng.hpp"

using namespace adaexp;

TEST_CASE("identical keys reproduce identical sequences") {
  RngStream a = RngStream::keyed({42, 7, 1});
  RngStream b = RngStream::keyed({42, 7, 1});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("fork does not advance the parent and children differ by tag") {
  RngStream root(99);
  RngStream c1 = root.fork(1);
  RngStream c2 = root.fork(2);
  const std::uint64_t first = root.next_u64();
  RngStream root2(99);
  root2.fork(5);
  CHECK(root2.next_u64() == first);
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) any_diff = any_diff || (c1.next_u64() != c2.next_u64());
  CHECK(any_diff);
}

TEST_CASE("outputs are a pure function of (key, counter)") {
  // interleaving two streams cannot perturb either one
  RngStream a = RngStream::keyed({1, 2});
  RngStream b = RngStream::keyed({3, 4});
  std::vector<std::uint64_t> seq;
  for (int i = 0; i < 10; ++i) seq.push_back(a.next_u64());
  RngStream a2 = RngStream::keyed({1, 2});
  RngStream b2 = RngStream::keyed({3, 4});
  for (int i = 0; i < 10; ++i) {
    CHECK(a2.next_u64() == seq[i]);
    b2.next_u64();
    (void)b;
  }
}

TEST_CASE("uniform lies strictly inside (0, 1)") {
  RngStream s(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform and normal have the right first two moments") {
  RngStream s(11);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    su += u;
    su2 += u * u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n - (su / n) * (su / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bernoulli frequency matches its probability") {
  RngStream s(13);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += s.bernoulli(0.3) ? 1 : 0;
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.3).epsilon(0.03));
}
