#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "orbitsplit/nn.hpp"
#include "reference_mlp.hpp"

using namespace orbitsplit;

namespace {

std::array<refmlp::Layer, 7> to_ref(const QNetwork& net) {
    std::array<refmlp::Layer, 7> out;
    for (std::size_t i = 0; i < 7; ++i) {
        const auto& l = net.layers()[i];
        refmlp::Layer& d = out[i];
        d.out = static_cast<std::size_t>(l.w.rows());
        d.in = static_cast<std::size_t>(l.w.cols());
        d.w.resize(d.out * d.in);
        for (std::size_t r = 0; r < d.out; ++r) {
            for (std::size_t c = 0; c < d.in; ++c) {
                d.w[r * d.in + c] = l.w(static_cast<Eigen::Index>(r),
                                        static_cast<Eigen::Index>(c));
            }
        }
        d.b.assign(l.b.data(), l.b.data() + l.b.size());
    }
    return out;
}

Vector random_input(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    Vector x(QNetwork::kInputDim);
    for (int i = 0; i < QNetwork::kInputDim; ++i) x(i) = d(rng);
    return x;
}

}  // namespace

TEST_CASE("parameter count is the architecture's exact size") {
    // 22*128+128, five 128*128+128, 128*18+18
    CHECK(QNetwork().parameter_count() == 87826);
    CHECK(QNetwork::random_init(3).parameter_count() == 87826);
}

TEST_CASE("default-constructed network outputs zero") {
    QNetwork net;
    const Vector q = net.forward_one(Vector::Ones(22));
    REQUIRE(q.size() == 18);
    CHECK(q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zeroed residual blocks leave the trunk untouched") {
    QNetwork net = QNetwork::random_init(11);
    for (std::size_t i = 2; i <= 5; ++i) {
        net.layers()[i].w.setZero();
        net.layers()[i].b.setZero();
    }
    std::mt19937_64 rng(5);
    const Vector x = random_input(rng);

    const auto& L = net.layers();
    const Vector h0 = ((L[0].w * x).colwise() + L[0].b).cwiseMax(0.0);
    const Vector h1 = ((L[1].w * Matrix(h0)).colwise() + L[1].b).cwiseMax(0.0);
    const Vector want = (L[6].w * Matrix(h1)).colwise() + L[6].b;

    const Vector got = net.forward_one(x);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("forward pass matches the plain-loop reference") {
    std::mt19937_64 rng(21);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const QNetwork net = QNetwork::random_init(seed);
        const auto ref = to_ref(net);
        for (int rep = 0; rep < 6; ++rep) {
            const Vector x = random_input(rng);
            const Vector got = net.forward_one(x);
            const auto want =
                refmlp::forward(ref, std::vector<double>(x.data(), x.data() + x.size()));
            REQUIRE(want.size() == 18);
            for (int i = 0; i < 18; ++i) {
                CHECK(got(i) == Catch::Approx(want[static_cast<std::size_t>(i)]).margin(1e-12));
            }
        }
    }
}

TEST_CASE("batch forward equals per-column forward") {
    const QNetwork net = QNetwork::random_init(9);
    std::mt19937_64 rng(99);
    Matrix x(22, 5);
    for (int c = 0; c < 5; ++c) x.col(c) = random_input(rng);
    const Matrix q = net.forward(x);
    REQUIRE(q.rows() == 18);
    REQUIRE(q.cols() == 5);
    for (int c = 0; c < 5; ++c) {
        CHECK((q.col(c) - net.forward_one(x.col(c))).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_THROWS_AS(net.forward(Matrix::Zero(21, 1)), std::invalid_argument);
}

TEST_CASE("first-layer pre-activations are homogeneous in the first layer's parameters") {
    QNetwork net = QNetwork::random_init(4);
    std::mt19937_64 rng(17);
    const Matrix x = random_input(rng);

    QNetwork::Tape before;
    net.forward(x, before);
    net.layers()[0].w *= 3.0;
    net.layers()[0].b *= 3.0;
    QNetwork::Tape after;
    net.forward(x, after);
    CHECK((after.z0 - 3.0 * before.z0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic gradients agree with central differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const double h = 1e-5;

    for (std::uint64_t seed = 101; seed <= 103; ++seed) {
        QNetwork net = QNetwork::random_init(seed);
        Matrix x(22, 4);
        for (int c = 0; c < 4; ++c) x.col(c) = random_input(rng);
        Matrix dq(18, 4);
        for (int r = 0; r < 18; ++r) {
            for (int c = 0; c < 4; ++c) dq(r, c) = coeff(rng);
        }
        // loss L = sum_ij dq_ij * q_ij, so dL/dq = dq exactly
        const auto loss = [&](const QNetwork& n) {
            return (n.forward(x).array() * dq.array()).sum();
        };

        QNetwork grad;
        QNetwork::Tape tape;
        net.forward(x, tape);
        net.backward(tape, dq, grad);

        double worst = 0.0;
        for (std::size_t li = 0; li < 7; ++li) {
            auto& w = net.layers()[li].w;
            auto& b = net.layers()[li].b;
            std::uniform_int_distribution<Eigen::Index> pr(0, w.rows() - 1);
            std::uniform_int_distribution<Eigen::Index> pc(0, w.cols() - 1);
            for (int s = 0; s < 20; ++s) {
                const Eigen::Index r = pr(rng), c = pc(rng);
                const double keep = w(r, c);
                w(r, c) = keep + h;
                const double up = loss(net);
                w(r, c) = keep - h;
                const double dn = loss(net);
                w(r, c) = keep;
                const double fd = (up - dn) / (2.0 * h);
                const double an = grad.layers()[li].w(r, c);
                worst = std::max(worst, std::abs(fd - an) / std::max(1e-4, std::abs(fd) + std::abs(an)));
            }
            for (int s = 0; s < 6; ++s) {
                const Eigen::Index r = pr(rng);
                const double keep = b(r);
                b(r) = keep + h;
                const double up = loss(net);
                b(r) = keep - h;
                const double dn = loss(net);
                b(r) = keep;
                const double fd = (up - dn) / (2.0 * h);
                const double an = grad.layers()[li].b(r);
                worst = std::max(worst, std::abs(fd - an) / std::max(1e-4, std::abs(fd) + std::abs(an)));
            }
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("backward accumulates into the gradient holder") {
    QNetwork net = QNetwork::random_init(6);
    std::mt19937_64 rng(61);
    const Matrix x = random_input(rng);
    Matrix dq = Matrix::Ones(18, 1);

    QNetwork::Tape tape;
    net.forward(x, tape);
    QNetwork once, twice;
    net.backward(tape, dq, once);
    net.backward(tape, dq, twice);
    net.backward(tape, dq, twice);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK((twice.layers()[i].w - 2.0 * once.layers()[i].w).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((twice.layers()[i].b - 2.0 * once.layers()[i].b).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("checkpoint JSON round-trips bit-exactly") {
    const QNetwork net = QNetwork::random_init(77);
    const QNetwork back = QNetwork::from_json(net.to_json());
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(back.layers()[i].w == net.layers()[i].w);
        CHECK(back.layers()[i].b == net.layers()[i].b);
    }

    SECTION("and through a file") {
        const std::string path = "nn_roundtrip_test.json";
        net.save(path);
        const QNetwork loaded = QNetwork::load(path);
        std::remove(path.c_str());
        for (std::size_t i = 0; i < 7; ++i) {
            CHECK(loaded.layers()[i].w == net.layers()[i].w);
        }
    }
}

TEST_CASE("malformed checkpoints are rejected") {
    const QNetwork net = QNetwork::random_init(8);

    auto j = net.to_json();
    j["schema_version"] = 2;
    CHECK_THROWS_WITH(QNetwork::from_json(j), "checkpoint: unsupported schema version");

    j = net.to_json();
    j["input_dim"] = 23;
    CHECK_THROWS_WITH(QNetwork::from_json(j), "checkpoint: architecture mismatch");

    j = net.to_json();
    j["layers"].erase(6);
    CHECK_THROWS_WITH(QNetwork::from_json(j), "checkpoint: wrong layer count");

    j = net.to_json();
    j["layers"][2]["out"] = 64;
    CHECK_THROWS_WITH(QNetwork::from_json(j),
                      Catch::Matchers::ContainsSubstring("layer 2 shape mismatch"));

    j = net.to_json();
    j["layers"][4]["w"].erase(0);
    CHECK_THROWS_WITH(QNetwork::from_json(j),
                      Catch::Matchers::ContainsSubstring("layer 4 payload size mismatch"));
}

TEST_CASE("argmax over Q-values breaks ties toward the lowest index") {
    Vector q = Vector::Zero(18);
    CHECK(argmax_q(q) == 0);
    q(7) = 2.0;
    q(12) = 2.0;
    CHECK(argmax_q(q) == 7);
    q(3) = 5.0;
    CHECK(argmax_q(q) == 3);
}

TEST_CASE("random init is seed-deterministic and bounded by the fan-in limit") {
    const QNetwork a = QNetwork::random_init(123);
    const QNetwork b = QNetwork::random_init(123);
    const QNetwork c = QNetwork::random_init(124);
    double diff_ac = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(a.layers()[i].w == b.layers()[i].w);
        diff_ac += (a.layers()[i].w - c.layers()[i].w).cwiseAbs().sum();
        const double limit = std::sqrt(6.0 / static_cast<double>(a.layers()[i].w.cols()));
        CHECK(a.layers()[i].w.cwiseAbs().maxCoeff() <= limit);
        CHECK(a.layers()[i].b.cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(diff_ac > 0.0);
}
