#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "udgfl/fl.hpp"
#include "udgfl/udg.hpp"

// Instance files: newline-delimited `id x y role cost` records, role in
// {client, facility, both, none}; cost present iff the role includes
// facility.  A JSON mirror of the same schema is accepted.

namespace udgfl {

using Json = nlohmann::ordered_json;

struct RawRecord {
    VertexId id;
    double x, y;
    std::string role;
    double cost = 0.0;
};

namespace detail {

inline bool role_is_client(const std::string& r) { return r == "client" || r == "both"; }
inline bool role_is_facility(const std::string& r) { return r == "facility" || r == "both"; }

inline FLInstance records_to_instance(std::vector<RawRecord> recs, bool mergeCoincident) {
    if (recs.empty()) throw std::runtime_error("instance file: no records");
    std::sort(recs.begin(), recs.end(),
              [](const RawRecord& a, const RawRecord& b) { return a.id < b.id; });

    if (mergeCoincident) {
        // Coincident points collapse into one: roles union, cheapest facility.
        std::map<std::pair<double, double>, std::size_t> seen;
        std::vector<RawRecord> merged;
        for (const auto& r : recs) {
            auto key = std::make_pair(r.x, r.y);
            auto it = seen.find(key);
            if (it == seen.end()) {
                seen[key] = merged.size();
                merged.push_back(r);
                continue;
            }
            RawRecord& m = merged[it->second];
            const bool cl = role_is_client(m.role) || role_is_client(r.role);
            bool fa = role_is_facility(m.role);
            if (role_is_facility(r.role)) {
                m.cost = fa ? std::min(m.cost, r.cost) : r.cost;
                fa = true;
            }
            m.role = fa ? (cl ? "both" : "facility") : (cl ? "client" : "none");
        }
        recs = std::move(merged);
    }

    std::vector<Point> pts;
    pts.reserve(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        pts.push_back({static_cast<VertexId>(i), recs[i].x, recs[i].y});

    FLInstance inst;
    inst.graph = std::make_shared<UnitDiskGraph>(build_udg(pts));
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        if (role_is_client(r.role)) inst.clients.push_back(static_cast<VertexId>(i));
        if (role_is_facility(r.role)) inst.facilities[static_cast<VertexId>(i)] = r.cost;
        if (!role_is_client(r.role) && !role_is_facility(r.role) && r.role != "none")
            throw std::runtime_error("instance file: unknown role '" + r.role + "'");
    }
    inst.validate();
    return inst;
}

}  // namespace detail

inline FLInstance parse_instance_text(std::istream& in, bool mergeCoincident = false) {
    std::vector<RawRecord> recs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        RawRecord r;
        if (!(ls >> r.id >> r.x >> r.y >> r.role))
            throw std::runtime_error("instance file: bad record: " + line);
        if (detail::role_is_facility(r.role) && !(ls >> r.cost))
            throw std::runtime_error("instance file: facility without cost: " + line);
        recs.push_back(r);
    }
    return detail::records_to_instance(std::move(recs), mergeCoincident);
}

inline FLInstance parse_instance_json(const Json& j, bool mergeCoincident = false) {
    std::vector<RawRecord> recs;
    for (const auto& p : j.at("points")) {
        RawRecord r;
        r.id = p.at("id").get<VertexId>();
        r.x = p.at("x").get<double>();
        r.y = p.at("y").get<double>();
        r.role = p.at("role").get<std::string>();
        if (detail::role_is_facility(r.role)) r.cost = p.at("cost").get<double>();
        recs.push_back(r);
    }
    return detail::records_to_instance(std::move(recs), mergeCoincident);
}

inline FLInstance read_instance(const std::string& path, bool mergeCoincident = false) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        Json j;
        in >> j;
        return parse_instance_json(j, mergeCoincident);
    }
    return parse_instance_text(in, mergeCoincident);
}

inline void write_instance(const FLInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out.precision(17);
    std::set<VertexId> clientSet(inst.clients.begin(), inst.clients.end());
    for (VertexId v = 0; v < inst.g().n(); ++v) {
        const Point& p = inst.g().points[v];
        const bool cl = clientSet.count(v);
        const bool fa = inst.facilities.count(v);
        std::string role = fa ? (cl ? "both" : "facility") : (cl ? "client" : "none");
        out << v << ' ' << p.x << ' ' << p.y << ' ' << role;
        if (fa) out << ' ' << inst.facilities.at(v);
        out << '\n';
    }
}

struct Provenance {
    std::string solver;
    std::uint64_t seed = 0;
    double eps = 0.0;
};

inline Json solution_to_json(const FLSolution& sol, const Provenance& prov,
                             const Json& credits = Json::array()) {
    Json j;
    j["open"] = sol.open;
    Json asg = Json::array();
    for (const auto& [c, a] : sol.assignment)
        asg.push_back({{"client", c}, {"facility", a.facility}, {"routeCost", a.routeCost}});
    j["assignment"] = asg;
    j["openCost"] = sol.openCost;
    j["connCost"] = sol.connCost;
    j["totalCost"] = sol.totalCost;
    j["credits"] = credits;
    j["provenance"] = {{"solver", prov.solver}, {"seed", prov.seed}, {"eps", prov.eps}};
    return j;
}

}  // namespace udgfl
