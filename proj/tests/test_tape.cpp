#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdii/rng.hpp"
#include "cdii/tape.hpp"
#include "support/fd_check.hpp"

#include <cmath>
#include <limits>

using namespace cdii;

TEST_CASE("variable and identity gradient") {
    Tape t;
    const NodeId x = t.variable(3.0);
    const auto g = t.backward(x);
    CHECK(g[static_cast<std::size_t>(x)] == 1.0);
}

TEST_CASE("square gradients at stationary point and away from it") {
    {
        Tape t;
        const NodeId x = t.variable(0.0);
        const NodeId f = t.record_binary(BinaryOp::Mul, x, x);
        CHECK(t.backward(f)[static_cast<std::size_t>(x)] == 0.0);
    }
    {
        Tape t;
        const NodeId x = t.variable(3.0);
        const NodeId f = t.record_binary(BinaryOp::Mul, x, x);
        CHECK(t.backward(f)[static_cast<std::size_t>(x)] == 6.0);
    }
}

TEST_CASE("binary op values and local partials") {
    Tape t;
    const NodeId a = t.variable(2.0);
    const NodeId b = t.variable(5.0);
    const NodeId m = t.record_binary(BinaryOp::Mul, a, b);
    CHECK(t.value(m) == 10.0);
    CHECK(t.node(m).partial0 == 5.0);
    CHECK(t.node(m).partial1 == 2.0);

    const NodeId one = t.variable(1.0);
    const NodeId two = t.variable(2.0);
    const NodeId d = t.record_binary(BinaryOp::Div, one, two);
    CHECK(t.value(d) == 0.5);
    CHECK(t.node(d).partial0 == 0.5);
    CHECK(t.node(d).partial1 == -0.25);
}

TEST_CASE("fan-out accumulates") {
    Tape t;
    const NodeId x = t.variable(1.5);
    const NodeId s = t.record_binary(BinaryOp::Add, x, x);
    CHECK(t.backward(s)[static_cast<std::size_t>(x)] == 2.0);
}

TEST_CASE("unary op values and partials") {
    Tape t;
    const NodeId z = t.variable(0.0);
    const NodeId th = t.record_unary(UnaryOp::Tanh, z);
    CHECK(t.value(th) == 0.0);
    CHECK(t.node(th).partial0 == 1.0);

    const NodeId m2 = t.variable(-2.0);
    const NodeId sq = t.record_unary(UnaryOp::Square, m2);
    CHECK(t.value(sq) == 4.0);
    CHECK(t.node(sq).partial0 == -4.0);

    const NodeId four = t.variable(4.0);
    const NodeId rt = t.record_unary(UnaryOp::Sqrt, four);
    CHECK(t.value(rt) == 2.0);
    CHECK(t.node(rt).partial0 == 0.25);
}

TEST_CASE("product gradient") {
    Tape t;
    const NodeId x = t.variable(3.0);
    const NodeId y = t.variable(4.0);
    const NodeId f = t.record_binary(BinaryOp::Mul, x, y);
    const auto g = t.backward(f);
    CHECK(g[static_cast<std::size_t>(x)] == 4.0);
    CHECK(g[static_cast<std::size_t>(y)] == 3.0);
}

TEST_CASE("tanh chain gradient at zero weight") {
    Tape t;
    const NodeId w = t.variable(0.0);
    const NodeId x = t.constant(5.0);
    const NodeId f = t.record_unary(UnaryOp::Tanh, t.record_binary(BinaryOp::Mul, w, x));
    CHECK(t.backward(f)[static_cast<std::size_t>(w)] == 5.0);
}

TEST_CASE("error paths carry the offending node") {
    Tape t;
    CHECK_THROWS_AS(t.variable(std::numeric_limits<double>::quiet_NaN()), TapeError);
    const NodeId a = t.variable(1.0);
    const NodeId z = t.variable(0.0);
    CHECK_THROWS_AS(t.record_binary(BinaryOp::Div, a, z), TapeError);
    try {
        t.record_binary(BinaryOp::Div, a, z);
    } catch (const TapeError& e) {
        CHECK(e.node() == z);
    }
    const NodeId neg = t.variable(-1.0);
    CHECK_THROWS_AS(t.record_unary(UnaryOp::Sqrt, neg), TapeError);
    CHECK_THROWS_AS(t.record_unary(UnaryOp::Sqrt, z), TapeError);

    // overflow never lands on the tape
    const NodeId huge = t.variable(1e308);
    CHECK_THROWS_AS(t.record_binary(BinaryOp::Add, huge, huge), TapeError);
    CHECK_THROWS_AS(t.record_binary(BinaryOp::Mul, huge, huge), TapeError);
    CHECK_THROWS_AS(t.record_unary(UnaryOp::Square, huge), TapeError);
}

namespace {

// Four stacked scalar tanh layers with a squared output, exercising every
// recorded op along the way.
NodeId little_net(Tape& t, const std::vector<NodeId>& v) {
    Expr h = wrap(t, t.constant(0.7));
    std::size_t k = 0;
    for (int layer = 0; layer < 4; ++layer) {
        const Expr w = wrap(t, v[k++]);
        const Expr b = wrap(t, v[k++]);
        h = tanh(w * h + b);
    }
    const Expr w_out = wrap(t, v[k++]);
    const Expr d = wrap(t, v[k++]);
    Expr out = w_out * h / (square(d) + wrap(t, t.constant(1.0))) - sqrt(square(d) + wrap(t, t.constant(0.5)));
    return square(out).id;
}

} // namespace

TEST_CASE("four-layer chain matches central finite differences") {
    Rng rng(20240811);
    std::vector<double> params(10);
    for (double& p : params) {
        p = rng.uniform(-1.0, 1.0);
    }
    cdii::testing::check_gradients(params, little_net, 1e-5, 1e-5, 1e-8);
}

TEST_CASE("property: random expression trees match finite differences") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::vector<double> params(6);
        for (double& p : params) {
            p = rng.uniform(0.2, 1.8); // keep sqrt/div well inside their domains
        }
        const auto build = [seed](Tape& t, const std::vector<NodeId>& v) {
            Rng ops(seed * 31 + 7);
            Expr acc = wrap(t, v[0]);
            for (std::size_t i = 1; i < v.size(); ++i) {
                const Expr x = wrap(t, v[i]);
                switch (static_cast<int>(ops.uniform01() * 6.0)) {
                case 0:
                    acc = acc + x;
                    break;
                case 1:
                    acc = acc - x;
                    break;
                case 2:
                    acc = acc * x;
                    break;
                case 3:
                    acc = acc / (square(x) + wrap(t, t.constant(0.5)));
                    break;
                case 4:
                    acc = tanh(acc) * x;
                    break;
                default:
                    acc = sqrt(square(acc) + square(x));
                    break;
                }
            }
            return acc.id;
        };
        cdii::testing::check_gradients(params, build, 1e-5, 1e-4, 1e-7);
    }
}

TEST_CASE("backward of a leaf is one for itself, zero elsewhere") {
    Tape t;
    const NodeId x = t.variable(1.0);
    const NodeId y = t.variable(2.0);
    (void)t.record_binary(BinaryOp::Mul, x, y);
    const auto g = t.backward(x);
    CHECK(g[static_cast<std::size_t>(x)] == 1.0);
    CHECK(g[static_cast<std::size_t>(y)] == 0.0);
}

TEST_CASE("linearity of gradients") {
    const double a = 2.5;
    const double b = -1.25;
    Tape t;
    const NodeId x = t.variable(0.8);
    const NodeId y = t.variable(-0.3);
    const Expr ex = wrap(t, x);
    const Expr ey = wrap(t, y);
    const Expr f = tanh(ex * ey) + square(ex);
    const Expr g = ex / (square(ey) + wrap(t, t.constant(1.0)));
    const Expr combo = wrap(t, t.constant(a)) * f + wrap(t, t.constant(b)) * g;
    const auto grad_f = t.backward(f.id);
    const auto grad_g = t.backward(g.id);
    const auto grad_c = t.backward(combo.id);
    for (const NodeId v : {x, y}) {
        const double expected = a * grad_f[static_cast<std::size_t>(v)] + b * grad_g[static_cast<std::size_t>(v)];
        CHECK(grad_c[static_cast<std::size_t>(v)] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("tape determinism is bitwise") {
    const auto run = [] {
        Tape t;
        std::vector<NodeId> v;
        for (int i = 0; i < 5; ++i) {
            v.push_back(t.variable(0.1 * (i + 1)));
        }
        Expr acc = wrap(t, v[0]);
        for (std::size_t i = 1; i < v.size(); ++i) {
            acc = tanh(acc * wrap(t, v[i]) + acc);
        }
        const auto g = t.backward(acc.id);
        return std::make_pair(acc.value(), g);
    };
    const auto [v1, g1] = run();
    const auto [v2, g2] = run();
    CHECK(v1 == v2);
    CHECK(g1 == g2);
}
