#include "fieldsim/depgraph.hpp"

#include "fieldsim/errors.hpp"

#include <algorithm>

namespace fieldsim::dep {

long& DepGraph::version_ref(const std::string& field) {
    if (!fields_->contains(field)) throw UnknownField("no field named '" + field + "'");
    return versions_[field]; // default 0 on first touch
}

void DepGraph::add_rule(std::string id, std::vector<std::string> inputs, std::string output,
                        Action action) {
    if (rule_by_id_.contains(id)) throw DuplicateName("rule id '" + id + "' already registered");
    if (!fields_->contains(output)) throw UnknownField("no field named '" + output + "'");
    for (const auto& in : inputs)
        if (!fields_->contains(in)) throw UnknownField("no field named '" + in + "'");
    if (rule_for_output_.contains(output))
        throw DuplicateOutputRule("field '" + output + "' already has rule '" +
                                  rules_[rule_for_output_[output]].id + "'");
    if (std::find(inputs.begin(), inputs.end(), output) != inputs.end())
        throw CycleDetected("cycle: " + output + "→" + output);

    // Would this rule close a cycle? Walk upstream from its inputs through
    // producing rules; hitting `output` means output already feeds an input.
    std::vector<std::string> path;
    auto reaches = [&](auto&& self, const std::string& field) -> bool {
        if (field == output) return true;
        auto it = rule_for_output_.find(field);
        if (it == rule_for_output_.end()) return false;
        for (const auto& in : rules_[it->second].inputs) {
            if (self(self, in)) {
                path.push_back(field);
                return true;
            }
        }
        return false;
    };
    for (const auto& in : inputs) {
        path.clear();
        if (reaches(reaches, in)) {
            // unwind order of `path` is already the data-flow direction
            std::string msg = "cycle: " + output;
            for (const auto& p : path) msg += "→" + p;
            msg += "→" + output;
            throw CycleDetected(msg);
        }
    }

    Rule r;
    r.id = std::move(id);
    r.inputs = std::move(inputs);
    r.output = std::move(output);
    r.action = std::move(action);
    r.last_input_versions.assign(r.inputs.size(), -1);
    rules_.push_back(std::move(r));
    rule_for_output_[rules_.back().output] = rules_.size() - 1;
    rule_by_id_[rules_.back().id] = rules_.size() - 1;
}

void DepGraph::write(const std::string& field) {
    if (rule_for_output_.contains(field))
        throw WriteToDerivedField("field '" + field + "' is produced by rule '" +
                                  rules_[rule_for_output_[field]].id + "'");
    ++version_ref(field);
}

void DepGraph::ensure(const std::string& field) {
    auto it = rule_for_output_.find(field);
    if (it == rule_for_output_.end()) return; // source field, nothing to do
    Rule& r = rules_[it->second];

    for (const auto& in : r.inputs) ensure(in);

    std::vector<long> current(r.inputs.size());
    for (std::size_t i = 0; i < r.inputs.size(); ++i) current[i] = version_ref(r.inputs[i]);
    if (current == r.last_input_versions) return;

    r.action(*fields_);
    long& v = version_ref(r.output);
    long old = v;
    ++v;
    ++r.compute_count;
    r.last_input_versions = std::move(current);
    if (trace_)
        trace_("exec " + r.id + " out=" + r.output + " v" + std::to_string(old) + "→" +
               std::to_string(v));
}

void DepGraph::request(const std::string& field) {
    if (!fields_->contains(field)) throw UnknownField("no field named '" + field + "'");
    ensure(field);
}

long DepGraph::version(const std::string& field) const {
    if (!fields_->contains(field)) throw UnknownField("no field named '" + field + "'");
    auto it = versions_.find(field);
    return it == versions_.end() ? 0 : it->second;
}

long DepGraph::compute_count(const std::string& rule_id) const {
    auto it = rule_by_id_.find(rule_id);
    if (it == rule_by_id_.end()) throw UnknownField("no rule named '" + rule_id + "'");
    return rules_[it->second].compute_count;
}

bool DepGraph::has_rule_for(const std::string& field) const {
    return rule_for_output_.contains(field);
}

} // namespace fieldsim::dep
