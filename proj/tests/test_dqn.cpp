#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "orbitsplit/dqn.hpp"
#include "orbitsplit/reporting.hpp"

using namespace orbitsplit;

namespace {

Vector random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    Vector x(kStateDim);
    for (int i = 0; i < kStateDim; ++i) x(i) = d(rng);
    return x;
}

Transition tagged_transition(double tag, std::mt19937_64& rng) {
    Transition t;
    t.s = random_state(rng);
    t.s_next = random_state(rng);
    t.action = static_cast<int>(tag) % kNumActions;
    t.reward = tag;
    t.terminal = false;
    return t;
}

Environment make_env(std::uint64_t trace_seed = 1) {
    const auto trace = generate(TrafficProfile::business(trace_seed), 96, 1);
    return Environment(trace, ModelParams::defaults(), RewardWeights{}, 100);
}

}  // namespace

TEST_CASE("replay buffer evicts oldest first at capacity") {
    std::mt19937_64 rng(3);
    ReplayBuffer buf(3);
    for (int i = 1; i <= 5; ++i) buf.push(tagged_transition(i, rng));
    REQUIRE(buf.size() == 3);
    CHECK(buf.at(0).reward == 3.0);
    CHECK(buf.at(1).reward == 4.0);
    CHECK(buf.at(2).reward == 5.0);
    CHECK(buf.capacity() == 3);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("batch sampling is without replacement and covers the buffer uniformly") {
    std::mt19937_64 rng(7);
    ReplayBuffer buf(10);
    for (int i = 0; i < 10; ++i) buf.push(tagged_transition(i, rng));

    CHECK_THROWS_AS(buf.sample_indices(11, rng), std::invalid_argument);

    std::array<int, 10> inclusion{};
    for (int rep = 0; rep < 3000; ++rep) {
        const auto idx = buf.sample_indices(3, rng);
        REQUIRE(idx.size() == 3);
        CHECK(idx[0] != idx[1]);
        CHECK(idx[0] != idx[2]);
        CHECK(idx[1] != idx[2]);
        for (const auto i : idx) inclusion[i]++;
    }
    // each index expected in 3/10 of draws (900 of 3000); allow ~5 sigma
    for (const int count : inclusion) {
        CHECK(count > 775);
        CHECK(count < 1025);
    }

    SECTION("full-size sample is a permutation") {
        const auto idx = buf.sample_indices(10, rng);
        std::array<bool, 10> seen{};
        for (const auto i : idx) seen[i] = true;
        for (const bool s : seen) CHECK(s);
    }
}

TEST_CASE("epsilon decays per step down to the floor") {
    const AgentHyperparams hp;
    CHECK(epsilon_at(hp, 0) == 0.5);
    CHECK(epsilon_at(hp, 1) == Catch::Approx(0.4975).margin(1e-12));
    CHECK(epsilon_at(hp, 100) == Catch::Approx(0.5 * std::pow(0.995, 100)).margin(1e-12));
    CHECK(epsilon_at(hp, 100000) == 0.0005);
}

TEST_CASE("hyperparameter validation names the offending field") {
    AgentHyperparams hp;
    hp.batch_size = 300;
    CHECK_THROWS_WITH(hp.validate(),
                      Catch::Matchers::ContainsSubstring("batch_size must not exceed"));
    hp = AgentHyperparams{};
    hp.mu = 1.5;
    CHECK_THROWS_WITH(hp.validate(), Catch::Matchers::ContainsSubstring("mu"));
    hp = AgentHyperparams{};
    hp.epsilon_decay = 1.0;
    CHECK_THROWS_WITH(hp.validate(), Catch::Matchers::ContainsSubstring("epsilon_decay"));
    hp = AgentHyperparams{};
    hp.learning_rate = 0.0;
    CHECK_THROWS_WITH(hp.validate(), Catch::Matchers::ContainsSubstring("learning_rate"));
}

TEST_CASE("greedy selection takes the argmax and ties go low") {
    std::mt19937_64 rng(5);
    QNetwork net;  // zero weights: outputs equal the head bias
    net.layers()[6].b(5) = 1.0;
    const Vector s = random_state(rng);
    for (int i = 0; i < 50; ++i) CHECK(select_action(net, s, 0.0, rng) == 5);

    net.layers()[6].b(3) = 1.0;  // equal maxima at 3 and 5
    for (int i = 0; i < 50; ++i) CHECK(select_action(net, s, 0.0, rng) == 3);
}

TEST_CASE("fully random selection is uniform over the 18 actions") {
    std::mt19937_64 rng(11);
    QNetwork net;
    net.layers()[6].b(9) = 100.0;  // argmax must not matter at epsilon = 1
    const Vector s = random_state(rng);

    std::array<double, kNumActions> counts{};
    const int n = 18000;
    for (int i = 0; i < n; ++i) counts[select_action(net, s, 1.0, rng)] += 1.0;

    const double expected = static_cast<double>(n) / kNumActions;
    double chi2 = 0.0;
    for (const double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 45.0);  // df 17, far beyond the 0.001 critical value
}

TEST_CASE("TD targets follow the one-step backup") {
    QNetwork target;
    target.layers()[6].b(0) = 2.0;  // max_a q(s', a) = 2 everywhere

    std::mt19937_64 rng(13);
    Transition t = tagged_transition(1.0, rng);
    t.reward = 1.0;
    std::vector<const Transition*> batch{&t};

    CHECK(td_targets(batch, target, 0.9)[0] == Catch::Approx(2.8).margin(1e-12));
    CHECK(td_targets(batch, target, 0.0)[0] == 1.0);

    t.terminal = true;
    CHECK(td_targets(batch, target, 0.9)[0] == 1.0);

    batch.clear();
    CHECK_THROWS_AS(td_targets(batch, target, 0.9), std::invalid_argument);
}

TEST_CASE("zero-TD batch gives zero loss and leaves parameters untouched") {
    std::mt19937_64 rng(17);
    QNetwork net = QNetwork::random_init(19);
    const QNetwork before = net;

    AgentHyperparams hp;
    hp.batch_size = 4;
    ReplayBuffer buf(8);
    for (int i = 0; i < 8; ++i) {
        Transition t = tagged_transition(i, rng);
        t.terminal = true;  // target = reward exactly
        t.reward = net.forward_one(t.s)(t.action);
        buf.push(t);
    }

    RmsProp opt(hp.learning_rate, hp.rms_decay, hp.rms_epsilon);
    const double loss = train_step(net, net, buf, hp, opt, rng);
    // batched GEMM and the single-column forward may differ by a few ULPs,
    // so "zero" loss means squared dust, not bitwise 0
    CHECK(loss < 1e-20);

    double change = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        change += (net.layers()[i].w - before.layers()[i].w).squaredNorm();
        change += (net.layers()[i].b - before.layers()[i].b).squaredNorm();
    }
    CHECK(std::sqrt(change) <= 1e-6);
}

TEST_CASE("repeated updates on one fixed transition drive the loss to zero") {
    std::mt19937_64 rng(23);
    QNetwork net = QNetwork::random_init(29);

    AgentHyperparams hp;
    hp.batch_size = 1;
    hp.replay_capacity = 1;
    hp.learning_rate = 0.01;  // overfit on purpose
    ReplayBuffer buf(1);
    Transition t = tagged_transition(0.0, rng);
    t.reward = 1.7;
    t.terminal = true;
    buf.push(t);

    RmsProp opt(hp.learning_rate, hp.rms_decay, hp.rms_epsilon);
    const double first = train_step(net, net, buf, hp, opt, rng);
    double last = first;
    bool reached = false;
    for (int i = 1; i < 1000 && !reached; ++i) {
        last = train_step(net, net, buf, hp, opt, rng);
        reached = last < 1e-8;
    }
    CHECK(first > 1e-3);
    CHECK(reached);
}

TEST_CASE("TD-loss gradient matches central finite differences") {
    std::mt19937_64 rng(31);
    const double h = 1e-5;

    for (std::uint64_t seed = 201; seed <= 203; ++seed) {
        QNetwork net = QNetwork::random_init(seed);
        const QNetwork target = QNetwork::random_init(seed + 50);

        std::vector<Transition> storage;
        for (int i = 0; i < 8; ++i) {
            Transition t = tagged_transition(i * 1.3 + 0.1, rng);
            t.terminal = (i % 4 == 0);
            storage.push_back(t);
        }
        std::vector<const Transition*> batch;
        for (const auto& t : storage) batch.push_back(&t);
        const std::vector<double> x = td_targets(batch, target, 0.9);

        Matrix s(kStateDim, 8);
        for (int i = 0; i < 8; ++i) s.col(i) = storage[static_cast<std::size_t>(i)].s;

        const auto loss = [&](const QNetwork& n) {
            const Matrix q = n.forward(s);
            double acc = 0.0;
            for (int i = 0; i < 8; ++i) {
                const double err =
                    q(storage[static_cast<std::size_t>(i)].action, i) - x[static_cast<std::size_t>(i)];
                acc += err * err / 8.0;
            }
            return acc;
        };

        QNetwork::Tape tape;
        const Matrix q = net.forward(s, tape);
        Matrix dq = Matrix::Zero(kNumActions, 8);
        for (int i = 0; i < 8; ++i) {
            const int a = storage[static_cast<std::size_t>(i)].action;
            dq(a, i) = 2.0 * (q(a, i) - x[static_cast<std::size_t>(i)]) / 8.0;
        }
        QNetwork grad;
        net.backward(tape, dq, grad);

        double worst = 0.0;
        for (std::size_t li = 0; li < 7; ++li) {
            auto& w = net.layers()[li].w;
            std::uniform_int_distribution<Eigen::Index> pr(0, w.rows() - 1);
            std::uniform_int_distribution<Eigen::Index> pc(0, w.cols() - 1);
            for (int draw = 0; draw < 12; ++draw) {
                const Eigen::Index r = pr(rng), c = pc(rng);
                const double keep = w(r, c);
                w(r, c) = keep + h;
                const double up = loss(net);
                w(r, c) = keep - h;
                const double dn = loss(net);
                w(r, c) = keep;
                const double fd = (up - dn) / (2.0 * h);
                const double an = grad.layers()[li].w(r, c);
                worst = std::max(worst,
                                 std::abs(fd - an) / std::max(1e-4, std::abs(fd) + std::abs(an)));
            }
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("target network sync is a snapshot, not an alias") {
    QNetwork net = QNetwork::random_init(41);
    QNetwork target = net;
    std::mt19937_64 rng(43);
    const Vector s = random_state(rng);
    CHECK((net.forward_one(s) - target.forward_one(s)).cwiseAbs().maxCoeff() == 0.0);

    const double original = net.layers()[0].w(0, 0);
    net.layers()[0].w(0, 0) += 1.0;
    CHECK(target.layers()[0].w(0, 0) == original);
    CHECK(net.layers()[0].w(0, 0) != original);
}

TEST_CASE("training syncs the target every period and is seed-deterministic") {
    AgentHyperparams hp;
    hp.episodes = 3;
    hp.seed = 99;

    Environment env1 = make_env();
    const TrainingArtifacts a = train(env1, hp);
    CHECK(a.total_steps == 300);
    REQUIRE_FALSE(a.sync_steps.empty());
    CHECK(a.sync_steps.size() == 3);
    for (std::size_t i = 0; i < a.sync_steps.size(); ++i) {
        CHECK(a.sync_steps[i] == static_cast<long>(100 * (i + 1)));
    }
    CHECK(a.log.size() == 300);

    // loss stays zero until the buffer holds a full batch
    for (int i = 0; i < 31; ++i) CHECK(a.log[static_cast<std::size_t>(i)].loss == 0.0);

    Environment env2 = make_env();
    const TrainingArtifacts b = train(env2, hp);
    CHECK(training_log_csv_text(a.log) == training_log_csv_text(b.log));

    hp.seed = 100;
    Environment env3 = make_env();
    const TrainingArtifacts c = train(env3, hp);
    CHECK(training_log_csv_text(a.log) != training_log_csv_text(c.log));
}

TEST_CASE("greedy rollout follows the network and reports feasibility") {
    QNetwork net;  // zero net: all Q equal, argmax = action 0 = set mono@GAT, split up
    Environment env = make_env();
    const EvalResult r = rollout_greedy(env, net, Configuration::from(Placement::MonoGat, 0), 0.9);
    REQUIRE(r.steps.size() == 100);
    // action 0 keeps placement 0 and pushes the split up until it saturates
    CHECK(r.steps[0].placement == 0);
    CHECK(r.steps[0].split == 1);
    CHECK(r.steps[5].split == 6);
    CHECK(r.steps[99].split == 6);
    for (const auto& s : r.steps) CHECK(s.feasible);  // mono@GAT is always feasible

    double want_return = 0.0, discount = 1.0, sum = 0.0;
    for (const auto& s : r.steps) {
        want_return += discount * s.reward_total;
        sum += s.reward_total;
        discount *= 0.9;
    }
    CHECK(r.discounted_return == Catch::Approx(want_return).margin(1e-12));
    CHECK(r.sum_reward == Catch::Approx(sum).margin(1e-12));
}
