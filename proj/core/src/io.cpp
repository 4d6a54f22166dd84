#include "walkbounds/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace walkbounds {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> string_list(const nlohmann::json& node, const char* where) {
    if (!node.is_array()) throw ParseError(std::string(where) + " must be an array of strings");
    std::vector<std::string> out;
    out.reserve(node.size());
    for (const auto& item : node) {
        if (!item.is_string()) throw ParseError(std::string(where) + " must contain only strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

Generated parse_document(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }

    if (!doc.is_object()) throw ParseError("document must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "states" && key != "transitions" && key != "partition") {
            throw ParseError("unexpected key '" + key + "' in document");
        }
    }
    if (!doc.contains("states") || !doc.contains("transitions") || !doc.contains("partition")) {
        throw ParseError("document needs 'states', 'transitions', and 'partition'");
    }

    std::vector<std::string> states = string_list(doc["states"], "'states'");
    const auto n = states.size();

    const auto& rows = doc["transitions"];
    if (!rows.is_array() || rows.size() != n) {
        throw ParseError("'transitions' must be an array with one row per state");
    }
    Eigen::MatrixXd transition(static_cast<int>(n), static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != n) {
            throw ParseError("'transitions' row " + std::to_string(i) + " must have " +
                             std::to_string(n) + " entries");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!row[j].is_number()) {
                throw ParseError("'transitions' entries must be numbers");
            }
            transition(static_cast<int>(i), static_cast<int>(j)) = row[j].get<double>();
        }
    }

    const auto& part = doc["partition"];
    if (!part.is_object()) throw ParseError("'partition' must be an object with keys A, B, C");
    for (const auto& [key, value] : part.items()) {
        (void)value;
        if (key != "A" && key != "B" && key != "C") {
            throw ParseError("unexpected partition class '" + key + "'");
        }
    }
    std::vector<std::string> class_a =
        part.contains("A") ? string_list(part["A"], "partition class A") : std::vector<std::string>{};
    std::vector<std::string> class_b =
        part.contains("B") ? string_list(part["B"], "partition class B") : std::vector<std::string>{};
    std::vector<std::string> class_c =
        part.contains("C") ? string_list(part["C"], "partition class C") : std::vector<std::string>{};

    Chain chain = build_chain(std::move(states), std::move(transition));
    Partition partition = build_partition(chain, class_a, class_b, class_c);
    return Generated{std::move(chain), std::move(partition)};
}

Generated read_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return parse_document(buffer.str());
}

std::string document_to_json(const Chain& chain, const Partition& partition) {
    ordered_json doc;
    doc["states"] = chain.states();

    ordered_json rows = ordered_json::array();
    for (int i = 0; i < chain.size(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < chain.size(); ++j) row.push_back(chain.prob(i, j));
        rows.push_back(std::move(row));
    }
    doc["transitions"] = std::move(rows);

    auto labels_of = [&](StateClass cls) {
        ordered_json list = ordered_json::array();
        for (int s : partition.members(cls)) list.push_back(chain.label(s));
        return list;
    };
    doc["partition"] = {{"A", labels_of(StateClass::A)},
                        {"B", labels_of(StateClass::B)},
                        {"C", labels_of(StateClass::C)}};

    return doc.dump(2) + "\n";
}

void write_document(const std::filesystem::path& path, const Chain& chain,
                    const Partition& partition) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << document_to_json(chain, partition);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace walkbounds
