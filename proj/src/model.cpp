#include "leftrs/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace leftrs {

namespace {

const TaskSpec& task_by_id(const SystemSpec& system, int task_id) {
    for (const TaskSpec& t : system.tasks)
        if (t.id == task_id)
            return t;
    throw std::out_of_range("unknown task id " + std::to_string(task_id));
}

} // namespace

std::vector<std::string> validate(const SystemSpec& system) {
    std::vector<std::string> out;
    auto add = [&out](const std::string& s) { out.push_back(s); };

    if (system.num_cores < 1)
        add("system: num_cores < 1");

    // resource invariants: c >= 1, ids unique and dense 0..K-1
    std::set<int> res_ids;
    for (const ResourceSpec& r : system.resources) {
        if (r.c < 1)
            add("resource " + std::to_string(r.id) + ": c < 1");
        if (!res_ids.insert(r.id).second)
            add("resource " + std::to_string(r.id) + ": duplicate id");
    }
    for (int x = 0; x < static_cast<int>(system.resources.size()); ++x)
        if (!res_ids.count(x))
            add("resources: ids not dense, missing " + std::to_string(x));

    std::set<int> task_ids;
    for (const TaskSpec& t : system.tasks) {
        const std::string who = "task " + std::to_string(t.id);
        if (!task_ids.insert(t.id).second)
            add(who + ": duplicate id");
        if (t.D > t.T)
            add(who + ": D > T");
        if (t.C < 0)
            add(who + ": C < 0");
        if (t.T < 1)
            add(who + ": T < 1");
        if (t.D < 1)
            add(who + ": D < 1");
        if (t.f < 0)
            add(who + ": f < 0");
        if (t.core < 0 || t.core >= system.num_cores)
            add(who + ": core " + std::to_string(t.core) + " out of range");
        for (const auto& [res, count] : t.accesses) {
            if (count < 0)
                add(who + ": negative request count for resource " +
                    std::to_string(res));
            if (!res_ids.count(res))
                add(who + ": references unknown resource " +
                    std::to_string(res));
        }
    }

    // priorities unique within each core
    std::map<std::pair<int, int>, int> prio_seen; // (core, P) -> task id
    for (const TaskSpec& t : system.tasks) {
        if (t.core < 0 || t.core >= system.num_cores)
            continue;
        auto key = std::make_pair(t.core, t.priority);
        auto [it, fresh] = prio_seen.emplace(key, t.id);
        if (!fresh)
            add("task " + std::to_string(t.id) + ": priority " +
                std::to_string(t.priority) + " duplicates task " +
                std::to_string(it->second) + " on core " +
                std::to_string(t.core));
    }

    return out;
}

std::vector<int> lhp(const SystemSpec& system, int task_id) {
    const TaskSpec& me = task_by_id(system, task_id);
    std::vector<int> out;
    for (const TaskSpec& t : system.tasks)
        if (t.id != me.id && t.core == me.core && t.priority > me.priority)
            out.push_back(t.id);
    return out;
}

std::vector<int> llp(const SystemSpec& system, int task_id) {
    const TaskSpec& me = task_by_id(system, task_id);
    std::vector<int> out;
    for (const TaskSpec& t : system.tasks)
        if (t.id != me.id && t.core == me.core && t.priority < me.priority)
            out.push_back(t.id);
    return out;
}

RequestCharge request_charge(const TaskSpec& task, int resource_id) {
    if (task.requests_to(resource_id) <= 0)
        throw std::invalid_argument(
            "task " + std::to_string(task.id) + " does not access resource " +
            std::to_string(resource_id));
    RequestCharge rc;
    rc.n = static_cast<std::int64_t>(task.f) + 1;
    rc.resource = resource_id;
    rc.task = task.id;
    return rc;
}

std::string system_to_json(const SystemSpec& system, int indent) {
    nlohmann::json j;
    j["num_cores"] = system.num_cores;
    j["resources"] = nlohmann::json::array();
    for (const ResourceSpec& r : system.resources)
        j["resources"].push_back({{"id", r.id}, {"c_us", r.c}});
    j["tasks"] = nlohmann::json::array();
    for (const TaskSpec& t : system.tasks) {
        nlohmann::json acc = nlohmann::json::object();
        for (const auto& [res, count] : t.accesses)
            acc[std::to_string(res)] = count;
        j["tasks"].push_back({{"id", t.id},
                              {"core", t.core},
                              {"C_us", t.C},
                              {"T_us", t.T},
                              {"D_us", t.D},
                              {"priority", t.priority},
                              {"f_max", t.f},
                              {"accesses", acc}});
    }
    return j.dump(indent);
}

SystemSpec system_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SystemSpec s;
    s.num_cores = j.at("num_cores").get<int>();
    for (const auto& jr : j.at("resources")) {
        ResourceSpec r;
        r.id = jr.at("id").get<int>();
        r.c = jr.at("c_us").get<usecs>();
        s.resources.push_back(r);
    }
    for (const auto& jt : j.at("tasks")) {
        TaskSpec t;
        t.id = jt.at("id").get<int>();
        t.core = jt.at("core").get<int>();
        t.C = jt.at("C_us").get<usecs>();
        t.T = jt.at("T_us").get<usecs>();
        t.D = jt.at("D_us").get<usecs>();
        t.priority = jt.at("priority").get<int>();
        t.f = jt.at("f_max").get<int>();
        for (auto it = jt.at("accesses").begin(); it != jt.at("accesses").end(); ++it)
            t.accesses[std::stoi(it.key())] = it.value().get<int>();
        s.tasks.push_back(t);
    }
    return s;
}

} // namespace leftrs
