#include "mamt/instance.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mamt {

using nlohmann::json;

Segment make_segment(int id, int target_id, double t_start, double t_end,
                     Point2 p_start, Point2 p_end) {
    Segment s;
    s.id = id;
    s.target_id = target_id;
    s.t_start = t_start;
    s.t_end = t_end;
    s.p_start = p_start;
    s.p_end = p_end;
    if (t_end > t_start)
        s.velocity = (p_end - p_start) / (t_end - t_start);
    return s;
}

int Instance::n_segments() const {
    int n = 0;
    for (const auto &t : targets) n += static_cast<int>(t.segments.size());
    return n;
}

const Segment &Instance::segment(int seg_id) const {
    for (const auto &t : targets)
        for (const auto &s : t.segments)
            if (s.id == seg_id) return s;
    throw std::out_of_range("no segment with id " + std::to_string(seg_id));
}

Point2 position_at(const Segment &seg, double t) {
    if (t < seg.t_start || t > seg.t_end)
        throw std::domain_error("time " + std::to_string(t) + " outside segment window [" +
                                std::to_string(seg.t_start) + ", " + std::to_string(seg.t_end) + "]");
    if (t == seg.t_start) return seg.p_start;
    if (t == seg.t_end) return seg.p_end;
    return seg.p_start + (t - seg.t_start) * seg.velocity;
}

Point2 position_at_clamped(const Segment &seg, double t) {
    return position_at(seg, std::clamp(t, seg.t_start, seg.t_end));
}

void assign_segment_ids(Instance &inst) {
    int next_id = 1;
    for (auto &target : inst.targets) {
        std::stable_sort(target.segments.begin(), target.segments.end(),
                         [](const Segment &a, const Segment &b) { return a.t_start < b.t_start; });
        for (auto &seg : target.segments) {
            seg.id = next_id++;
            seg.target_id = target.id;
        }
    }
}

namespace {

void check_segment(const Instance &inst, const Target &target, const Segment &seg,
                   std::vector<Finding> &out) {
    const std::string where = "target " + std::to_string(target.id) + " segment " + std::to_string(seg.id);
    if (!(seg.t_start < seg.t_end)) {
        out.push_back({Severity::Error, "segment.degenerate",
                       where + ": t_start must be strictly below t_end"});
        return;
    }
    if (seg.t_start < 0.0 || seg.t_end > inst.horizon)
        out.push_back({Severity::Error, "segment.bounds",
                       where + ": window exceeds [0, horizon]"});
    const Point2 derived = (seg.p_end - seg.p_start) / (seg.t_end - seg.t_start);
    if (!(seg.velocity == derived))
        out.push_back({Severity::Error, "segment.velocity",
                       where + ": stored velocity differs from the derived value"});
    if (!seg.p_start.finite() || !seg.p_end.finite() || !std::isfinite(seg.t_start) ||
        !std::isfinite(seg.t_end))
        out.push_back({Severity::Error, "segment.finite", where + ": non-finite field"});
    const double half = inst.arena_side / 2.0 + 1e-9 * std::max(1.0, inst.arena_side);
    for (const Point2 &p : {seg.p_start, seg.p_end}) {
        if (std::abs(p.x - inst.depot.x) > half || std::abs(p.y - inst.depot.y) > half) {
            out.push_back({Severity::Error, "segment.arena",
                           where + ": endpoint outside the arena square"});
            break;
        }
    }
    if (seg.velocity.norm() >= inst.v_max)
        out.push_back({Severity::Warning, "target.speed",
                       where + ": segment speed reaches or exceeds v_max"});
}

} // namespace

std::vector<Finding> validate_instance(const Instance &inst) {
    std::vector<Finding> out;
    if (!(inst.v_max > 0.0))
        out.push_back({Severity::Error, "instance.params", "v_max must be positive"});
    if (!(inst.horizon > 0.0))
        out.push_back({Severity::Error, "instance.params", "horizon must be positive"});
    if (!(inst.arena_side > 0.0))
        out.push_back({Severity::Error, "instance.params", "arena_side must be positive"});
    if (inst.n_agents < 1)
        out.push_back({Severity::Error, "instance.params", "n_agents must be at least 1"});
    if (inst.targets.empty())
        out.push_back({Severity::Error, "instance.targets", "instance has no targets"});

    std::vector<int> seen_ids;
    for (const auto &target : inst.targets) {
        if (target.segments.empty()) {
            out.push_back({Severity::Error, "target.empty",
                           "target " + std::to_string(target.id) + " has no segments"});
            continue;
        }
        const Segment *prev = nullptr;
        for (const auto &seg : target.segments) {
            check_segment(inst, target, seg, out);
            seen_ids.push_back(seg.id);
            if (seg.target_id != target.id)
                out.push_back({Severity::Error, "segment.owner",
                               "segment " + std::to_string(seg.id) + " has a mismatched target_id"});
            if (prev) {
                if (seg.t_start < prev->t_end)
                    out.push_back({Severity::Error, "segments.overlap",
                                   "target " + std::to_string(target.id) +
                                       ": segment windows overlap or are out of order"});
                else if (seg.t_start == prev->t_end && !(seg.p_start == prev->p_end))
                    out.push_back({Severity::Error, "segments.continuity",
                                   "target " + std::to_string(target.id) +
                                       ": time-abutting segments jump in position"});
            }
            prev = &seg;
        }
    }

    std::sort(seen_ids.begin(), seen_ids.end());
    if (std::adjacent_find(seen_ids.begin(), seen_ids.end()) != seen_ids.end())
        out.push_back({Severity::Error, "segment.id", "duplicate segment ids"});
    for (int id : seen_ids)
        if (id <= 0) {
            out.push_back({Severity::Error, "segment.id", "segment ids must be positive"});
            break;
        }
    return out;
}

ValidationError::ValidationError(const std::vector<Finding> &fs)
    : std::runtime_error([&fs] {
          std::ostringstream os;
          os << "instance failed validation:";
          for (const auto &f : fs)
              if (f.severity == Severity::Error) os << "\n  " << f.code << ": " << f.message;
          return os.str();
      }()),
      findings(fs) {}

namespace {

double require_number(const json &obj, const char *field, const std::string &ctx) {
    if (!obj.contains(field))
        throw ParseError(ctx + ": missing field '" + field + "'");
    const json &v = obj.at(field);
    if (!v.is_number())
        throw ParseError(ctx + ": field '" + field + "' must be a number");
    return v.get<double>();
}

Point2 require_point(const json &obj, const char *field, const std::string &ctx) {
    if (!obj.contains(field))
        throw ParseError(ctx + ": missing field '" + field + "'");
    const json &v = obj.at(field);
    if (!v.is_object())
        throw ParseError(ctx + ": field '" + field + "' must be an object {x, y}");
    return {require_number(v, "x", ctx + "." + field), require_number(v, "y", ctx + "." + field)};
}

} // namespace

Instance load_instance(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("instance file: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("instance file: top level must be an object");

    const double version = require_number(doc, "version", "instance");
    if (version != 1)
        throw ParseError("instance: unsupported version " + std::to_string(version));

    Instance inst;
    inst.arena_side = require_number(doc, "arena_side", "instance");
    inst.horizon = require_number(doc, "horizon", "instance");
    inst.v_max = require_number(doc, "v_max", "instance");
    inst.n_agents = static_cast<int>(require_number(doc, "n_agents", "instance"));
    inst.depot = require_point(doc, "depot", "instance");

    if (!doc.contains("targets") || !doc.at("targets").is_array())
        throw ParseError("instance: missing or non-array field 'targets'");

    for (const json &jt : doc.at("targets")) {
        Target target;
        target.id = static_cast<int>(require_number(jt, "id", "target"));
        const std::string ctx = "target " + std::to_string(target.id);
        if (!jt.contains("segments") || !jt.at("segments").is_array())
            throw ParseError(ctx + ": missing or non-array field 'segments'");
        for (const json &js : jt.at("segments")) {
            target.segments.push_back(make_segment(
                0, target.id, require_number(js, "t_start", ctx), require_number(js, "t_end", ctx),
                require_point(js, "p_start", ctx), require_point(js, "p_end", ctx)));
        }
        inst.targets.push_back(std::move(target));
    }

    assign_segment_ids(inst);
    auto findings = validate_instance(inst);
    if (has_errors(findings)) throw ValidationError(findings);
    return inst;
}

std::string save_instance(const Instance &inst) {
    json doc;
    doc["version"] = 1;
    doc["arena_side"] = inst.arena_side;
    doc["horizon"] = inst.horizon;
    doc["v_max"] = inst.v_max;
    doc["n_agents"] = inst.n_agents;
    doc["depot"] = {{"x", inst.depot.x}, {"y", inst.depot.y}};
    json jtargets = json::array();
    for (const auto &target : inst.targets) {
        json jt;
        jt["id"] = target.id;
        json jsegs = json::array();
        for (const auto &seg : target.segments) {
            jsegs.push_back({{"t_start", seg.t_start},
                             {"t_end", seg.t_end},
                             {"p_start", {{"x", seg.p_start.x}, {"y", seg.p_start.y}}},
                             {"p_end", {{"x", seg.p_end.x}, {"y", seg.p_end.y}}}});
        }
        jt["segments"] = std::move(jsegs);
        jtargets.push_back(std::move(jt));
    }
    doc["targets"] = std::move(jtargets);
    return doc.dump(2) + "\n";
}

Instance load_instance_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_instance(buf.str());
}

void save_instance_file(const Instance &inst, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << save_instance(inst);
}

} // namespace mamt
