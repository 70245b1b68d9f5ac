#pragma once

#include "fieldsim/mesh.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace fieldsim::dep {

/// Lazy recomputation over a FieldSet. Fields are nodes; rules connect
/// input fields to one output field each. Per-field version counters plus
/// per-rule snapshots of the input versions at last execution make
/// request() run exactly the stale ancestors, in topological order.
///
/// Sources (fields without a producing rule) are mutated externally and
/// announced via write(); rule outputs may only be written by the engine.
class DepGraph {
public:
    using Action = std::function<void(FieldSet&)>;

    explicit DepGraph(FieldSet& fields) : fields_(&fields) {}

    /// Register a rule. The output gains its producing rule; inputs and
    /// output must exist. Rejects a second rule for the same output, a
    /// reused rule id, and any dependency cycle (reported with its path).
    void add_rule(std::string id, std::vector<std::string> inputs, std::string output,
                  Action action);

    /// Announce an external mutation of a source field.
    void write(const std::string& field);

    /// Bring `field` up to date, executing only stale ancestor rules.
    void request(const std::string& field);

    long version(const std::string& field) const;
    long compute_count(const std::string& rule_id) const;
    bool has_rule_for(const std::string& field) const;

    FieldSet& fields() { return *fields_; }

    /// Sink for one line per executed rule: `exec <id> out=<field> v<old>→<new>`.
    void set_trace(std::function<void(const std::string&)> sink) { trace_ = std::move(sink); }

private:
    struct Rule {
        std::string id;
        std::vector<std::string> inputs;
        std::string output;
        Action action;
        std::vector<long> last_input_versions; // -1 until first execution
        long compute_count = 0;
    };

    long& version_ref(const std::string& field);
    void ensure(const std::string& field);

    FieldSet* fields_;
    std::vector<Rule> rules_;
    std::map<std::string, std::size_t> rule_for_output_;
    std::map<std::string, std::size_t> rule_by_id_;
    std::map<std::string, long> versions_;
    std::function<void(const std::string&)> trace_;
};

} // namespace fieldsim::dep
