#include <doctest.h>

#include <cmath>

#include "hienet/tape.hpp"
#include "hienet/trainer.hpp"

using namespace hienet;

TEST_CASE("softmax rows sum to one") {
    Rng rng(1);
    Tape t;
    int x = t.constant(Tensor::randn({6, 9}, rng, 2.0));
    int y = t.softmax_rows(x);
    for (int r = 0; r < 6; ++r) {
        double s = 0.0;
        for (int c = 0; c < 9; ++c) s += t.val(y).at(r, c);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("conv1d valid arithmetic: length-5 input, width-3 filter -> 3 outputs") {
    Tape t;
    int x = t.constant(Tensor::from_rows(5, 1, {1, 2, 3, 4, 5}));
    int w = t.constant(Tensor::from_rows(1, 3, {1, 1, 1}));
    int b = t.constant(Tensor({1}));
    int y = t.conv1d(x, w, b, 3);
    REQUIRE(t.val(y).shape == std::vector<int>{3, 1});
    CHECK(t.val(y).at(0, 0) == 6.0);
    CHECK(t.val(y).at(1, 0) == 9.0);
    CHECK(t.val(y).at(2, 0) == 12.0);
}

TEST_CASE("conv1d rejects inputs shorter than the window") {
    Tape t;
    int x = t.constant(Tensor({2, 3}));
    int w = t.constant(Tensor({4, 9}));
    int b = t.constant(Tensor({4}));
    CHECK_THROWS_AS(t.conv1d(x, w, b, 3), std::invalid_argument);
}

TEST_CASE("matmul hand case 2x3 * 3x2") {
    // [[1,2,3],[4,5,6]] * [[7,8],[9,10],[11,12]] = [[58,64],[139,154]]
    Tape t;
    int a = t.constant(Tensor::from_rows(2, 3, {1, 2, 3, 4, 5, 6}));
    int b = t.constant(Tensor::from_rows(3, 2, {7, 8, 9, 10, 11, 12}));
    int c = t.matmul(a, b);
    CHECK(t.val(c).at(0, 0) == 58.0);
    CHECK(t.val(c).at(0, 1) == 64.0);
    CHECK(t.val(c).at(1, 0) == 139.0);
    CHECK(t.val(c).at(1, 1) == 154.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tape t;
    int a = t.constant(Tensor({2, 3}));
    int b = t.constant(Tensor({2, 3}));
    CHECK_THROWS_WITH_AS(t.matmul(a, b), doctest::Contains("[2x3]"), std::invalid_argument);
}

TEST_CASE("every primitive passes the gradient check in isolation") {
    for (const auto& [name, err] : primitive_grad_checks(123, 20)) {
        INFO(name);
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("grad of sum of squares is 2x exactly") {
    Rng rng(3);
    Tensor x = Tensor::randn({4, 4}, rng);
    Tape t;
    int p = t.param(x);
    int loss = t.sum_all(t.mul(p, p));
    t.backward(loss);
    for (int i = 0; i < x.numel(); ++i) CHECK(t.grad(p)[i] == 2.0 * x[i]);

    const double err = grad_check(
        [](Tape& tt, const std::vector<int>& ids) { return tt.sum_all(tt.mul(ids[0], ids[0])); },
        {x});
    CHECK(err <= 1e-9);
}

TEST_CASE("gradient of a constant objective is exactly zero") {
    Rng rng(4);
    Tensor x = Tensor::randn({3, 3}, rng);
    Tape t;
    int p = t.param(x);
    int c = t.constant(Tensor::full({3, 3}, 1.5));
    int loss = t.sum_all(c);
    (void)p;
    t.backward(loss);
    for (int i = 0; i < x.numel(); ++i) CHECK(t.grad(p)[i] == 0.0);
}

TEST_CASE("grad_check rejects non-finite objectives") {
    CHECK_THROWS_AS(grad_check(
                        [](Tape& t, const std::vector<int>& ids) {
                            return t.log(t.scale(t.mul(ids[0], ids[0]), 0.0));
                        },
                        {Tensor::full({2, 2}, 1.0)}),
                    std::exception);
}

TEST_CASE("concat/slice backward scatters to exactly the source coordinates") {
    Rng rng(5);
    Tensor a = Tensor::randn({2, 3}, rng);
    Tensor b = Tensor::randn({3, 3}, rng);
    Tape t;
    int pa = t.param(a);
    int pb = t.param(b);
    int cat = t.concat({pa, pb}, 0);
    // take only the slice that covers b's middle row
    int sl = t.slice(cat, 0, 3, 1);
    int loss = t.sum_all(sl);
    t.backward(loss);
    for (int i = 0; i < a.numel(); ++i) CHECK(t.grad(pa)[i] == 0.0);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(t.grad(pb).at(r, c) == (r == 1 ? 1.0 : 0.0));
}

TEST_CASE("max ties route gradient to the lowest index") {
    Tape t;
    int p = t.param(Tensor::from_rows(3, 2, {1.0, 5.0, 7.0, 5.0, 7.0, 2.0}));
    int m = t.max_over_axis(p, 0);  // col max; col0 ties rows 1,2 -> row 1
    int loss = t.sum_all(m);
    t.backward(loss);
    CHECK(t.grad(p).at(1, 0) == 1.0);
    CHECK(t.grad(p).at(2, 0) == 0.0);
    CHECK(t.grad(p).at(0, 1) == 1.0);  // col1 max is row 0
}

TEST_CASE("relu subgradient at the kink is zero") {
    Tape t;
    int p = t.param(Tensor::from_rows(1, 3, {-1.0, 0.0, 2.0}));
    int loss = t.sum_all(t.relu(p));
    t.backward(loss);
    CHECK(t.grad(p)[0] == 0.0);
    CHECK(t.grad(p)[1] == 0.0);
    CHECK(t.grad(p)[2] == 1.0);
}

TEST_CASE("dropout mask entries are zero or 1/(1-rate)") {
    Rng mrng(7);
    Tensor mask = dropout_mask({8, 8}, 0.2, mrng);
    int dropped = 0;
    for (int i = 0; i < mask.numel(); ++i) {
        if (mask[i] == 0.0) ++dropped;
        else CHECK(mask[i] == doctest::Approx(1.0 / 0.8).epsilon(1e-12));
    }
    CHECK(dropped > 0);
    CHECK(dropped < mask.numel());
}

TEST_CASE("adam: zero gradient from scratch leaves params bit-identical") {
    Tensor w = Tensor::from_rows(1, 2, {0.5, -0.25});
    Tensor g({1, 2});
    AdamState st;
    AdamConfig cfg;
    cfg.lr = 0.1;
    adam_step({&w}, {&g}, st, cfg);
    CHECK(w.data == std::vector<double>{0.5, -0.25});

    // after a real step, a zero gradient decays the moments
    Tensor g1 = Tensor::from_rows(1, 2, {1.0, -1.0});
    adam_step({&w}, {&g1}, st, cfg);
    const double m0 = st.m[0][0];
    const double v0 = st.v[0][0];
    adam_step({&w}, {&g}, st, cfg);
    CHECK(st.m[0][0] == doctest::Approx(0.9 * m0).epsilon(1e-12));
    CHECK(st.v[0][0] == doctest::Approx(0.999 * v0).epsilon(1e-12));
}

TEST_CASE("adam first step is approximately -lr * sign(g)") {
    Tensor w = Tensor::from_rows(1, 1, {2.0});
    Tensor g = Tensor::from_rows(1, 1, {0.37});
    AdamState st;
    AdamConfig cfg;
    cfg.lr = 1e-3;
    adam_step({&w}, {&g}, st, cfg);
    CHECK(w[0] == doctest::Approx(2.0 - 1e-3).epsilon(1e-6));
}

TEST_CASE("adam on f(x)=x^2 decreases monotonically over 10 steps") {
    Tensor x = Tensor::from_rows(1, 1, {1.0});
    AdamState st;
    AdamConfig cfg;
    cfg.lr = 0.05;
    double prev = 1.0;
    for (int i = 0; i < 10; ++i) {
        Tensor g = Tensor::from_rows(1, 1, {2.0 * x[0]});
        adam_step({&x}, {&g}, st, cfg);
        const double f = x[0] * x[0];
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("backward runs once and requires a scalar") {
    Tape t;
    int p = t.param(Tensor::from_rows(2, 2, {1, 2, 3, 4}));
    CHECK_THROWS_AS(t.backward(p), std::invalid_argument);
    int s = t.sum_all(p);
    t.backward(s);
    CHECK_THROWS_AS(t.backward(s), std::logic_error);
}
