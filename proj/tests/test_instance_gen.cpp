#include "mamt/instance_gen.hpp"

#include "mamt/oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace mamt;

namespace {

// Merge a target's segment spans into maximal abutting groups; the generator
// carves each trajectory down to its visibility windows, so the groups are
// exactly the windows that survived clipping.
std::vector<std::pair<double, double>> span_groups(const Target &target) {
    std::vector<std::pair<double, double>> groups;
    for (const Segment &seg : target.segments) {
        if (!groups.empty() && seg.t_start <= groups.back().second + 1e-9)
            groups.back().second = seg.t_end;
        else
            groups.push_back({seg.t_start, seg.t_end});
    }
    return groups;
}

} // namespace

TEST_CASE("generation is a pure function of its recipe") {
    GenConfig cfg;
    cfg.n_targets = 4;
    cfg.seed = 7;
    const std::string first = save_instance(generate_instance(cfg));
    const std::string again = save_instance(generate_instance(cfg));
    CHECK(first == again);

    cfg.seed = 8;
    CHECK(save_instance(generate_instance(cfg)) != first);
}

TEST_CASE("generated instances honor the recipe invariants") {
    for (uint64_t seed : {1, 2, 3, 4, 5, 6}) {
        GenConfig cfg;
        cfg.n_targets = 2 + static_cast<int>(seed % 4); // 2..5
        cfg.n_agents = 1 + static_cast<int>(seed % 2);
        cfg.seed = seed;
        CAPTURE(seed);
        Instance inst = generate_instance(cfg);

        CHECK(!has_errors(validate_instance(inst)));
        CHECK(static_cast<int>(inst.targets.size()) == cfg.n_targets);
        CHECK(inst.n_agents == cfg.n_agents);
        CHECK(inst.v_max == cfg.v_max);
        CHECK(inst.horizon == cfg.horizon);
        CHECK(inst.arena_side == cfg.arena_side);

        const double window = cfg.total_window_duration / 2.0;
        for (const Target &target : inst.targets) {
            CAPTURE(target.id);
            REQUIRE(!target.segments.empty());
            double covered = 0.0;
            for (const Segment &seg : target.segments) {
                const double speed = seg.velocity.norm();
                CHECK(speed >= cfg.speed_min - 1e-9);
                CHECK(speed <= cfg.speed_max + 1e-9);
                covered += seg.duration();
                CHECK(seg.t_start >= -1e-9);
                CHECK(seg.t_end <= cfg.horizon + 1e-9);
            }
            CHECK(covered <= cfg.total_window_duration + 1e-6);

            auto groups = span_groups(target);
            REQUIRE(groups.size() <= 2);
            for (auto [lo, hi] : groups) CHECK(hi - lo <= window + 1e-9);
            if (groups.size() == 2) CHECK(groups[1].first >= groups[0].second - 1e-9);
        }
    }
}

TEST_CASE("a generated instance always admits a one-agent schedule") {
    for (uint64_t seed : {11, 12, 13}) {
        GenConfig cfg;
        cfg.n_targets = 3;
        cfg.seed = seed;
        CAPTURE(seed);
        Instance inst = generate_instance(cfg);

        std::vector<int> order(static_cast<size_t>(cfg.n_targets));
        std::iota(order.begin(), order.end(), 1);
        bool feasible = false;
        do {
            auto cert = certify_order(inst, order);
            if (cert && cert->completion <= cfg.horizon + 1e-9) {
                feasible = true;
                break;
            }
        } while (std::next_permutation(order.begin(), order.end()));
        CHECK(feasible);
    }
}

TEST_CASE("impossible recipes are rejected up front") {
    GenConfig cfg;
    cfg.n_targets = 0;
    CHECK_THROWS_AS((void)generate_instance(cfg), std::invalid_argument);
    cfg.n_targets = 3;
    cfg.windows_per_target = 3;
    CHECK_THROWS_AS((void)generate_instance(cfg), std::invalid_argument);
    cfg.windows_per_target = 2;
    cfg.total_window_duration = 200.0; // cannot fit inside a 150 s horizon
    CHECK_THROWS_AS((void)generate_instance(cfg), std::invalid_argument);
    cfg.total_window_duration = 40.0;
    cfg.speed_min = -1.0;
    CHECK_THROWS_AS((void)generate_instance(cfg), std::invalid_argument);
    cfg.speed_min = 0.5;
    (void)generate_instance(cfg); // the restored recipe is fine
}
