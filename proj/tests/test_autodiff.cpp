#include <doctest.h>

#include <cmath>

#include "qtp/error.hpp"
#include "qtp/random.hpp"
#include "qtp/tape.hpp"

using namespace qtp;
using namespace qtp::ad;

namespace {

constexpr double kTol = 1e-4;

Tensor random_tensor(Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  Tensor t(r, c);
  for (double& x : t.data()) x = rng.uniform(lo, hi);
  return t;
}

// Fixed random weights turn any output into a scalar with a generic gradient.
Var weighted_sum(Tape& tape, Var v, std::uint64_t seed) {
  Rng rng(seed);
  return sum(mul(v, tape.constant(random_tensor(rng, v.rows(), v.cols()))));
}

double check(const LossBuilder& f, std::vector<Tensor>& params) {
  std::vector<Tensor*> ptrs;
  for (auto& p : params) ptrs.push_back(&p);
  return finite_diff_check(f, ptrs);
}

}  // namespace

TEST_CASE("primitive examples") {
  Tape t;
  CHECK(row_softmax(t.constant(Tensor(1, 2, 0.0))).value() == Tensor(1, 2, {0.5, 0.5}));
  CHECK(leaky_relu(t.constant(Tensor(1, 1, -2.0)), 0.01).value()(0, 0) == doctest::Approx(-0.02));
  CHECK(leaky_relu(t.constant(Tensor(1, 1, 3.0)), 0.01).value()(0, 0) == 3.0);
  const std::vector<int> ids{0, 0, 1};
  CHECK(segment_mean(t.constant(Tensor(3, 1, {2, 4, 6})), ids, 2).value() == Tensor(2, 1, {3, 6}));
  CHECK(segment_sum(t.constant(Tensor(3, 1, {2, 4, 6})), ids, 2).value() == Tensor(2, 1, {6, 6}));
  const auto sm = segment_softmax(t.constant(Tensor(3, 1, {1, 1, 5})), ids, 2).value();
  CHECK(sm == Tensor(3, 1, {0.5, 0.5, 1.0}));
  CHECK(matmul(t.constant(Tensor(1, 2, {1, 2})), t.constant(Tensor(2, 1, {3, 4}))).value()(0, 0) == 11.0);
  CHECK(add(t.constant(Tensor(2, 2, 1.0)), t.constant(Tensor(1, 2, {1, 2}))).value() == Tensor(2, 2, {2, 3, 2, 3}));
  const Var parts[] = {t.constant(Tensor(1, 1, 1.0)), t.constant(Tensor(1, 2, {2, 3}))};
  CHECK(concat_cols(parts).value() == Tensor(1, 3, {1, 2, 3}));
  CHECK(clamp_min(t.constant(Tensor(1, 2, {1e-20, 0.5})), 1e-12).value() == Tensor(1, 2, {1e-12, 0.5}));
  const std::vector<int> pick{2, 0};
  CHECK(gather_rows(t.constant(Tensor(3, 1, {7, 8, 9})), pick).value() == Tensor(2, 1, {9, 7}));
}

TEST_CASE("shape and domain errors") {
  Tape t;
  const Var a = t.constant(Tensor(2, 3, 1.0));
  const Var b = t.constant(Tensor(2, 3, 1.0));
  CHECK_THROWS_AS(matmul(a, b), DataError);
  CHECK_THROWS_AS(add(a, t.constant(Tensor(1, 2, 1.0))), DataError);
  CHECK_THROWS_AS(mul(a, t.constant(Tensor(3, 2, 1.0))), DataError);
  const std::vector<int> ids{0, 2};
  CHECK_THROWS_AS(segment_mean(a, ids, 3), DataError);
  CHECK_THROWS_AS(segment_mean(a, std::vector<int>{0}, 1), DataError);
  CHECK_THROWS_AS(log(t.constant(Tensor(1, 1, 0.0))), DataError);
  CHECK_THROWS_AS(t.backward(a), DataError);
  Tape other;
  const Var foreign = other.constant(Tensor(1, 1, 1.0));
  CHECK_THROWS_AS(t.backward(foreign), DataError);
}

TEST_CASE("gradient of sum(W x) is the broadcast outer structure") {
  Tensor w(2, 3, {1, 2, 3, 4, 5, 6});
  const Tensor x(3, 1, {0.5, -1, 2});
  Tape t;
  const Var pw = t.param(w);
  t.backward(sum(matmul(pw, t.constant(x))));
  const Tensor& g = t.grad(pw);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(g(r, c) == x(c, 0));
}

TEST_CASE("log-softmax gradient is p - e_k") {
  Tensor z(1, 4, {0.3, -1.2, 2.0, 0.1});
  const int k = 2;
  Tape t;
  const Var pz = t.param(z);
  const Var p = row_softmax(pz);
  const Var onehot = t.constant(Tensor(1, 4, {0, 0, 1, 0}));
  t.backward(scale(sum(mul(log(p), onehot)), -1.0));
  const Tensor& g = t.grad(pz);
  for (int j = 0; j < 4; ++j) {
    const double expect = p.value()(0, j) - (j == k ? 1.0 : 0.0);
    CHECK(g(0, j) == doctest::Approx(expect).epsilon(1e-12));
    CHECK((g(0, j) < 0) == (j == k));
  }
  std::vector<Tensor> params{z};
  CHECK(check([&](Tape& tp, std::span<const Var> v) {
    return scale(sum(mul(log(row_softmax(v[0])), tp.constant(Tensor(1, 4, {0, 0, 1, 0})))), -1.0);
  }, params) <= kTol);
}

TEST_CASE("finite differences on a quadratic and with no parameters") {
  std::vector<Tensor> w{Tensor(1, 1, 3.0)};
  Tape t;
  const Var pw = t.param(w[0]);
  t.backward(sum(mul(pw, pw)));
  CHECK(t.grad(pw)(0, 0) == 6.0);
  CHECK(check([](Tape&, std::span<const Var> v) { return sum(mul(v[0], v[0])); }, w) <= 1e-9);
  std::vector<Tensor> none;
  CHECK(check([](Tape& tp, std::span<const Var>) { return tp.constant(Tensor(1, 1, 2.0)); }, none) == 0.0);
}

TEST_CASE("every primitive passes finite differences on random inputs") {
  Rng rng(1234);
  const std::vector<int> ids{0, 1, 0, 2, 1};
  const std::vector<int> pick{4, 0, 0, 3};
  const auto sparse = SparseMatrix::from_triplets(4, 5, {{{0, 1}, 0.5}, {{1, 0}, -1.0}, {{3, 4}, 2.0}, {{2, 2}, 0.7}, {{0, 4}, 0.1}});

  for (int trial = 0; trial < 5; ++trial) {
    const std::uint64_t s = 100 + trial;
    auto run = [&](const char* name, std::vector<Tensor> params, const LossBuilder& f) {
      INFO(name);
      CHECK(check(f, params) <= kTol);
    };
    run("matmul", {random_tensor(rng, 3, 4), random_tensor(rng, 4, 2)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, matmul(v[0], v[1]), s); });
    run("add", {random_tensor(rng, 3, 4), random_tensor(rng, 3, 4)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, add(v[0], v[1]), s); });
    run("add broadcast", {random_tensor(rng, 3, 4), random_tensor(rng, 1, 4)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, add(v[0], v[1]), s); });
    run("mul", {random_tensor(rng, 3, 4), random_tensor(rng, 3, 4)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, mul(v[0], v[1]), s); });
    run("mul self", {random_tensor(rng, 2, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, mul(v[0], v[0]), s); });
    run("scale", {random_tensor(rng, 3, 2)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, scale(v[0], -2.5), s); });
    run("mul_rows", {random_tensor(rng, 4, 3), random_tensor(rng, 4, 1)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, mul_rows(v[0], v[1]), s); });
    run("concat_cols", {random_tensor(rng, 3, 2), random_tensor(rng, 3, 1), random_tensor(rng, 3, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, concat_cols(v), s); });
    run("leaky_relu", {random_tensor(rng, 4, 4)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, leaky_relu(v[0], 0.2), s); });
    run("row_softmax", {random_tensor(rng, 3, 5, -3, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, row_softmax(v[0]), s); });
    run("log", {random_tensor(rng, 3, 3, 0.5, 2.0)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, log(v[0]), s); });
    run("clamp_min", {random_tensor(rng, 3, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, clamp_min(v[0], 0.05), s); });
    run("gather_rows", {random_tensor(rng, 5, 2)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, gather_rows(v[0], pick), s); });
    run("spmm", {random_tensor(rng, 5, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, spmm(sparse, v[0]), s); });
    run("segment_sum", {random_tensor(rng, 5, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, segment_sum(v[0], ids, 3), s); });
    run("segment_mean", {random_tensor(rng, 5, 3)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, segment_mean(v[0], ids, 3), s); });
    run("segment_softmax", {random_tensor(rng, 5, 1, -2, 2)},
        [&](Tape& t, std::span<const Var> v) { return weighted_sum(t, segment_softmax(v[0], ids, 3), s); });
  }
}

TEST_CASE("a composed graph passes finite differences") {
  Rng rng(77);
  const std::vector<int> seg{0, 0, 1, 1, 1, 2};
  std::vector<Tensor> params{random_tensor(rng, 6, 4), random_tensor(rng, 4, 3), random_tensor(rng, 1, 3),
                             random_tensor(rng, 3, 1), random_tensor(rng, 6, 2)};
  auto f = [&](Tape& t, std::span<const Var> v) {
    const Var h = leaky_relu(add(matmul(v[0], v[1]), v[2]), 0.01);
    const Var att = segment_softmax(leaky_relu(matmul(h, v[3]), 0.2), seg, 3);
    const Var pooled = segment_sum(mul_rows(h, att), seg, 3);
    const Var both = concat_cols(std::vector<Var>{pooled, segment_mean(h, seg, 3)});
    const Var p = row_softmax(matmul(gather_rows(both, std::vector<int>{0, 1, 2}), concat_cols(std::vector<Var>{v[4], v[4]})));
    return scale(sum(mul(log(clamp_min(p, 1e-12)), t.constant(Tensor(3, 4, 0.25)))), -1.0);
  };
  CHECK(check(f, params) <= kTol);
}

TEST_CASE("gradients accumulate over repeated use and reset between passes") {
  Tensor w(1, 1, 2.0);
  Tape t;
  const Var pw = t.param(w);
  const Var loss = add(add(pw, pw), scale(pw, 3.0));
  t.backward(loss);
  CHECK(t.grad(pw)(0, 0) == 5.0);
  t.backward(loss);
  CHECK(t.grad(pw)(0, 0) == 5.0);
  const Var unused = t.param(w);
  CHECK(t.grad(unused)(0, 0) == 0.0);
}

TEST_CASE("forward and backward are bit-identical across runs") {
  auto run = [] {
    Rng rng(55);
    Tensor a = random_tensor(rng, 8, 6);
    Tensor b = random_tensor(rng, 6, 3);
    Tape t;
    const Var pa = t.param(a);
    const Var pb = t.param(b);
    const Var out = row_softmax(leaky_relu(matmul(pa, pb), 0.01));
    t.backward(weighted_sum(t, out, 9));
    return std::tuple{out.value(), t.grad(pa), t.grad(pb)};
  };
  CHECK(run() == run());
}

TEST_CASE("subtracting segment means leaves zero segment means") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(30));
    const int k = 1 + static_cast<int>(rng.below(n));
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i < k ? i : static_cast<int>(rng.below(k));
    Tape t;
    const Var x = t.constant(random_tensor(rng, n, 4, -10, 10));
    const Var centered = add(x, scale(gather_rows(segment_mean(x, ids, k), ids), -1.0));
    const Tensor m = segment_mean(centered, ids, k).value();
    for (double v : m.data()) CHECK(std::abs(v) <= 1e-12);
  }
}

TEST_CASE("dense kernels agree with naive loops") {
  Rng rng(3);
  for (double density : {1.0, 0.1}) {
    Tensor a = random_tensor(rng, 7, 9);
    for (double& x : a.data())
      if (rng.uniform() > density) x = 0.0;
    const Tensor b = random_tensor(rng, 9, 5);
    const Tensor g = random_tensor(rng, 7, 5);
    const Tensor c = matmul(a, b);
    Tensor tn(9, 5), nt(7, 9);
    matmul_acc_tn(a, g, tn);
    matmul_acc_nt(g, b, nt);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 5; ++j) {
        double s = 0;
        for (int k = 0; k < 9; ++k) s += a(i, k) * b(k, j);
        CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-13));
      }
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 5; ++j) {
        double s = 0;
        for (int k = 0; k < 7; ++k) s += a(k, i) * g(k, j);
        CHECK(tn(i, j) == doctest::Approx(s).epsilon(1e-13));
      }
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 9; ++j) {
        double s = 0;
        for (int k = 0; k < 5; ++k) s += g(i, k) * b(j, k);
        CHECK(nt(i, j) == doctest::Approx(s).epsilon(1e-13));
      }
  }
  const auto sp = SparseMatrix::from_triplets(2, 2, {{{0, 1}, 1.0}, {{0, 1}, 2.0}, {{1, 0}, 4.0}});
  CHECK(sp.to_dense() == Tensor(2, 2, {0, 3, 4, 0}));
  CHECK(ad::spmm(sp, Tensor(2, 1, {1, 2})) == Tensor(2, 1, {6, 4}));
}
