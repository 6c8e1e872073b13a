#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "semclip/tensor.hpp"

using namespace semclip;

namespace {

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, bool requires_grad = false) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : t.values()) v = dist(rng);
    return t;
}

Tensor random_unit(int d, std::mt19937_64& rng, bool requires_grad = false) {
    Tensor t = random_tensor({d}, rng, requires_grad);
    double n = 0.0;
    for (double v : t.values()) n += v * v;
    n = std::sqrt(n);
    for (double& v : t.values()) v /= n;
    return t;
}

}  // namespace

TEST_CASE("matmul identity and dot product") {
    Tape tape;
    Tensor eye = Tensor::from_values({2, 2}, {1, 0, 0, 1});
    Tensor v = Tensor::from_values({2, 1}, {3, 4});
    Tensor out = tape.matmul(eye, v);
    CHECK(out.at(0, 0) == doctest::Approx(3.0));
    CHECK(out.at(1, 0) == doctest::Approx(4.0));

    Tensor a = Tensor::from_values({1, 2}, {1, 2});
    Tensor b = Tensor::from_values({2, 1}, {3, 4});
    CHECK(tape.matmul(a, b).at(0, 0) == doctest::Approx(11.0));
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tape tape;
    Tensor a = Tensor::zeros({3, 4});
    Tensor b = Tensor::zeros({3, 2});
    try {
        tape.matmul(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[3x4]") != std::string::npos);
        CHECK(msg.find("[3x2]") != std::string::npos);
    }
}

TEST_CASE("matmul gradient vs central differences") {
    std::mt19937_64 rng(11);
    Tensor b = random_tensor({4, 2}, rng);
    auto f = [&](Tape& t, const Tensor& x) { return t.sum(t.matmul(x, b)); };
    Tensor a = random_tensor({3, 4}, rng);
    CHECK(finite_difference_check(f, a, 1e-5) < 1e-6);

    Tensor a_fixed = random_tensor({3, 4}, rng);
    auto g = [&](Tape& t, const Tensor& x) { return t.sum(t.matmul(a_fixed, x)); };
    CHECK(finite_difference_check(g, b, 1e-5) < 1e-6);
}

TEST_CASE("matmul associativity at fp64") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Tensor a = random_tensor({4, 4}, rng);
        Tensor b = random_tensor({4, 4}, rng);
        Tensor c = random_tensor({4, 4}, rng);
        Tape tape;
        Tensor left = tape.matmul(tape.matmul(a, b), c);
        Tensor right = tape.matmul(a, tape.matmul(b, c));
        for (long i = 0; i < left.numel(); ++i) {
            CHECK(left.values()[i] == doctest::Approx(right.values()[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("l2_normalize basics") {
    Tape tape;
    Tensor v = Tensor::from_values({2}, {3, 4});
    Tensor out = tape.l2_normalize(v);
    CHECK(out.at(0) == doctest::Approx(0.6));
    CHECK(out.at(1) == doctest::Approx(0.8));

    Tensor axis = Tensor::from_values({3}, {0, 0, 5});
    Tensor unit = tape.l2_normalize(axis);
    CHECK(unit.at(2) == doctest::Approx(1.0));

    Tensor zero = Tensor::zeros({3});
    CHECK_THROWS_AS(tape.l2_normalize(zero), DegenerateError);
}

TEST_CASE("l2_normalize gradient") {
    std::mt19937_64 rng(13);
    Tensor probe = random_tensor({8}, rng);
    Tensor weights = random_tensor({8}, rng);
    auto f = [&](Tape& t, const Tensor& x) { return t.sum(t.mul(t.l2_normalize(x), weights)); };
    CHECK(finite_difference_check(f, probe, 1e-5) < 1e-6);
}

TEST_CASE("cosine similarity values") {
    Tape tape;
    CHECK(tape.cosine_similarity(Tensor::from_values({2}, {1, 0}),
                                 Tensor::from_values({2}, {0, 1}))
              .item() == doctest::Approx(0.0));
    CHECK(tape.cosine_similarity(Tensor::from_values({2}, {2, 0}),
                                 Tensor::from_values({2}, {1, 0}))
              .item() == doctest::Approx(1.0));
    CHECK(tape.cosine_similarity(Tensor::from_values({2}, {1, 1}),
                                 Tensor::from_values({2}, {1, 0}))
              .item() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
    CHECK_THROWS_AS(tape.cosine_similarity(Tensor::zeros({2}), Tensor::from_values({2}, {1, 0})),
                    DegenerateError);
}

TEST_CASE("softmax cross entropy rows") {
    Tape tape;
    CHECK(tape.softmax_cross_entropy_row(Tensor::from_values({1}, {5.0}), 0).item() ==
          doctest::Approx(0.0));
    CHECK(tape.softmax_cross_entropy_row(Tensor::from_values({2}, {0, 0}), 0).item() ==
          doctest::Approx(std::log(2.0)));
    // direct evaluation: -log(e^2 / (e^2 + e^1 + e^0))
    const double expected = -std::log(std::exp(2.0) / (std::exp(2.0) + std::exp(1.0) + 1.0));
    CHECK(tape.softmax_cross_entropy_row(Tensor::from_values({3}, {2, 1, 0}), 0).item() ==
          doctest::Approx(expected).epsilon(1e-4));
    CHECK(expected == doctest::Approx(0.4076).epsilon(1e-3));
    CHECK_THROWS_AS(tape.softmax_cross_entropy_row(Tensor::from_values({3}, {2, 1, 0}), 3),
                    IndexError);
}

TEST_CASE("backward on sum fills leaf gradient") {
    Tape tape;
    Tensor x = Tensor::from_values({3}, {1, 2, 3}, true);
    Tensor s = tape.sum(x);
    tape.backward(s);
    for (double g : x.grad()) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("backward rejects non-scalar roots") {
    Tape tape;
    Tensor x = Tensor::from_values({3}, {1, 2, 3}, true);
    Tensor y = tape.affine(x, 2.0, 0.0);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
}

TEST_CASE("cosine gradient is orthogonal to a unit input") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor x = random_unit(16, rng, true);
        Tensor ref = random_unit(16, rng);
        Tape tape;
        Tensor c = tape.cosine_similarity(x, ref);
        tape.backward(c);
        double dot = 0.0;
        for (long i = 0; i < x.numel(); ++i) dot += x.grad()[i] * x.values()[i];
        CHECK(std::abs(dot) < 1e-10);
    }
}

TEST_CASE("gradient accumulation is additive until reset") {
    // Two separate backward sweeps accumulate the same gradients as a single
    // sweep over the summed root.
    Tensor x0 = Tensor::from_values({2}, {0.3, -1.2});
    Tensor w = Tensor::from_values({2}, {2.0, 0.5});

    Tensor xa = x0.clone();
    xa.set_requires_grad(true);
    {
        Tape tape;
        Tensor r1 = tape.sum(tape.mul(xa, w));
        Tensor r2 = tape.sum(tape.tanh(xa));
        tape.backward(r1);
        tape.backward(r2);
    }

    Tensor xb = x0.clone();
    xb.set_requires_grad(true);
    {
        Tape tape;
        Tensor combined = tape.add(tape.sum(tape.mul(xb, w)), tape.sum(tape.tanh(xb)));
        tape.backward(combined);
    }
    for (long i = 0; i < xa.numel(); ++i) {
        CHECK(xa.grad()[i] == doctest::Approx(xb.grad()[i]).epsilon(1e-12));
    }

    xa.zero_grad();
    for (double g : xa.grad()) CHECK(g == 0.0);
}

TEST_CASE("finite differences on a quadratic are near-exact") {
    Tensor x = Tensor::from_values({2}, {1, 2});
    auto f = [](Tape& t, const Tensor& v) { return t.sum(t.mul(v, v)); };
    CHECK(finite_difference_check(f, x, 1e-5) < 1e-8);
}

TEST_CASE("finite difference check reports NaN as infinity") {
    Tensor x = Tensor::from_values({2}, {1.0, 2.0});
    auto f = [](Tape& t, const Tensor& v) {
        Tensor nan_t = Tensor::scalar(std::nan(""));
        return t.scale_by(t.sum(v), nan_t);
    };
    CHECK(std::isinf(finite_difference_check(f, x, 1e-5)));
}

TEST_CASE("primitive op gradients at random points") {
    std::mt19937_64 rng(23);
    auto check_many = [&](const char* name, const ScalarFn& f, std::vector<int> shape,
                          double tol) {
        for (int i = 0; i < 10; ++i) {
            Tensor x = random_tensor(shape, rng);
            INFO(name << " trial " << i);
            CHECK(finite_difference_check(f, x, 1e-5) < tol);
        }
    };

    Tensor m2 = random_tensor({3, 5}, rng);
    Tensor v5 = random_tensor({5}, rng);
    Tensor v3 = random_tensor({3}, rng);
    Tensor vv = random_tensor({4}, rng);

    check_many("transpose", [&](Tape& t, const Tensor& x) {
        return t.sum(t.mul(t.transpose(x), Tensor::from_values({5, 3}, std::vector<double>(15, 0.7))));
    }, {3, 5}, 1e-6);
    check_many("add", [&](Tape& t, const Tensor& x) { return t.sum(t.add(x, m2)); }, {3, 5}, 1e-6);
    check_many("sub", [&](Tape& t, const Tensor& x) { return t.sum(t.sub(m2, x)); }, {3, 5}, 1e-6);
    check_many("mul", [&](Tape& t, const Tensor& x) { return t.sum(t.mul(x, m2)); }, {3, 5}, 1e-6);
    check_many("add_row_bias(m)", [&](Tape& t, const Tensor& x) {
        return t.sum(t.add_row_bias(x, v5));
    }, {3, 5}, 1e-6);
    check_many("add_row_bias(b)", [&](Tape& t, const Tensor& x) {
        return t.sum(t.add_row_bias(m2, x));
    }, {5}, 1e-6);
    check_many("affine", [&](Tape& t, const Tensor& x) { return t.sum(t.affine(x, -2.5, 1.0)); },
               {3, 5}, 1e-6);
    check_many("scale_by(a)", [&](Tape& t, const Tensor& x) {
        return t.sum(t.scale_by(x, Tensor::scalar(1.7)));
    }, {3, 5}, 1e-6);
    check_many("scale_by(s)", [&](Tape& t, const Tensor& x) {
        return t.sum(t.scale_by(m2, x));
    }, {}, 1e-6);
    check_many("exp", [&](Tape& t, const Tensor& x) { return t.sum(t.exp(x)); }, {4}, 1e-6);
    check_many("tanh", [&](Tape& t, const Tensor& x) { return t.sum(t.tanh(x)); }, {4}, 1e-6);
    check_many("relu", [&](Tape& t, const Tensor& x) { return t.sum(t.relu(x)); }, {9}, 1e-4);
    check_many("l2_normalize_rows", [&](Tape& t, const Tensor& x) {
        return t.sum(t.mul(t.l2_normalize_rows(x), m2));
    }, {3, 5}, 1e-6);
    check_many("cosine", [&](Tape& t, const Tensor& x) {
        return t.cosine_similarity(x, vv);
    }, {4}, 1e-6);
    check_many("rowwise_cosine", [&](Tape& t, const Tensor& x) {
        return t.mean(t.rowwise_cosine(x, m2));
    }, {3, 5}, 1e-6);
    check_many("softmax_ce", [&](Tape& t, const Tensor& x) {
        return t.softmax_cross_entropy_row(x, 2);
    }, {5}, 1e-6);
    check_many("row", [&](Tape& t, const Tensor& x) {
        return t.sum(t.mul(t.row(x, 1), v5));
    }, {3, 5}, 1e-6);
    check_many("col", [&](Tape& t, const Tensor& x) {
        return t.sum(t.mul(t.col(x, 2), v3));
    }, {3, 5}, 1e-6);
    check_many("as_row", [&](Tape& t, const Tensor& x) {
        return t.sum(t.matmul(t.as_row(x), m2.clone()));
    }, {3}, 1e-6);
    check_many("mean", [&](Tape& t, const Tensor& x) { return t.mean(x); }, {7}, 1e-6);
    check_many("embed_mean_pool", [&](Tape& t, const Tensor& x) {
        return t.sum(t.embed_mean_pool(x, {{0, 1, 1}, {2}}));
    }, {3, 5}, 1e-6);
}

TEST_CASE("matmul kernels match between tapes and plain loops") {
    // Spot check against a hand-rolled triple loop.
    std::mt19937_64 rng(3);
    Tensor a = random_tensor({5, 7}, rng);
    Tensor b = random_tensor({7, 4}, rng);
    Tape tape;
    Tensor out = tape.matmul(a, b);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 4; ++j) {
            double want = 0.0;
            for (int l = 0; l < 7; ++l) want += a.at(i, l) * b.at(l, j);
            CHECK(out.at(i, j) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}
