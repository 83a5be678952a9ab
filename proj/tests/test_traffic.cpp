#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "orbitsplit/traffic.hpp"

using namespace orbitsplit;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

}  // namespace

TEST_CASE("generated business profile hits its peak and mean") {
    TrafficProfile p = TrafficProfile::business(3);
    p.noise_std_mbps = 0.0;
    const auto trace = generate(p, 96, 1);
    REQUIRE(trace.size() == 96);

    // step 48 is 12:00 exactly
    CHECK(trace[48].time_of_day_h == Catch::Approx(12.0));
    CHECK(trace[48].lambda_ru_mbps == Catch::Approx(200.0).margin(1e-9));

    double mean = 0.0;
    for (const auto& s : trace) mean += s.lambda_ru_mbps;
    mean /= static_cast<double>(trace.size());
    CHECK(mean == Catch::Approx(100.0).epsilon(0.05));

    SECTION("residential peaks at 20h") {
        TrafficProfile r = TrafficProfile::residential(3);
        r.noise_std_mbps = 0.0;
        const auto rt = generate(r, 96, 1);
        CHECK(rt[80].time_of_day_h == Catch::Approx(20.0));
        CHECK(rt[80].lambda_ru_mbps == Catch::Approx(200.0).margin(1e-9));
    }
}

TEST_CASE("generated samples stay in bounds and are deterministic") {
    TrafficProfile p = TrafficProfile::business(11);
    const auto a = generate(p, 96, 2);
    const auto b = generate(p, 96, 2);
    REQUIRE(a.size() == 192);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].lambda_ru_mbps >= 0.0);
        CHECK(a[i].lambda_ru_mbps <= p.peak_mbps);
        CHECK(a[i].step == static_cast<long>(i));
        CHECK(a[i].lambda_ru_mbps == b[i].lambda_ru_mbps);
    }

    TrafficProfile q = p;
    q.seed = 12;
    const auto c = generate(q, 96, 2);
    bool any_diff = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].lambda_ru_mbps != a[i].lambda_ru_mbps) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("profile validation") {
    TrafficProfile p = TrafficProfile::business();
    p.mean_mbps = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TrafficProfile::business();
    p.mean_mbps = 300.0;  // above peak
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TrafficProfile::business();
    p.peak_hour = 24.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TrafficProfile::business();
    p.noise_std_mbps = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(generate(TrafficProfile::business(), 0), std::invalid_argument);
}

TEST_CASE("trace round-trips through CSV") {
    const auto trace = generate(TrafficProfile::residential(5), 96, 1);
    const std::string path = temp_path("orbitsplit_trace_roundtrip.csv");
    save_trace(trace, path);
    const auto back = load_trace(path);
    REQUIRE(back.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(back[i].step == trace[i].step);
        CHECK(back[i].time_of_day_h == trace[i].time_of_day_h);   // exact via to_chars
        CHECK(back[i].lambda_ru_mbps == trace[i].lambda_ru_mbps);
    }
    std::remove(path.c_str());
}

TEST_CASE("trace loading errors") {
    const std::string path = temp_path("orbitsplit_trace_case.csv");

    SECTION("valid two-line file") {
        write_file(path, "step,time_of_day_h,lambda_ru_mbps\n0,0,10\n1,0.25,11.5\n");
        const auto t = load_trace(path);
        REQUIRE(t.size() == 2);
        CHECK(t[1].lambda_ru_mbps == 11.5);
    }

    SECTION("empty file gives an empty trace") {
        write_file(path, "");
        CHECK(load_trace(path).empty());
    }

    SECTION("header-only file gives an empty trace") {
        write_file(path, "step,time_of_day_h,lambda_ru_mbps\n");
        CHECK(load_trace(path).empty());
    }

    SECTION("missing file is an error") {
        CHECK_THROWS_AS(load_trace(temp_path("orbitsplit_no_such_file.csv")), std::runtime_error);
    }

    SECTION("negative lambda names the line") {
        write_file(path, "step,time_of_day_h,lambda_ru_mbps\n0,0,10\n1,0.25,-5\n");
        CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("line 3"));
    }

    SECTION("garbage row names the line") {
        write_file(path, "step,time_of_day_h,lambda_ru_mbps\n0,zero,10\n");
        CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("line 2"));
    }

    SECTION("wrong header rejected") {
        write_file(path, "a,b,c\n0,0,10\n");
        CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("line 1"));
    }

    SECTION("non-increasing steps rejected") {
        write_file(path, "step,time_of_day_h,lambda_ru_mbps\n1,0,10\n1,0.25,11\n");
        CHECK_THROWS_WITH(load_trace(path),
                          Catch::Matchers::ContainsSubstring("strictly increasing"));
    }
    std::remove(path.c_str());
}
