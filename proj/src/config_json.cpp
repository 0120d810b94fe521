#include "config_json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tobra {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, size_t offset) {
    int line = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

BraneType parse_type(const std::string& t) {
    if (t == "electric") return BraneType::electric;
    if (t == "magnetic") return BraneType::magnetic;
    fail(ErrorCode::parse_error, "brane type must be \"electric\" or \"magnetic\", got \"" + t + "\"");
}

} // namespace

BraneConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << "config parse error near line " << line_of_offset(text, e.byte) << ": "
            << e.what();
        fail(ErrorCode::parse_error, msg.str());
    }
    try {
        BraneConfig config;
        if (!doc.contains("dims") || !doc["dims"].is_array())
            fail(ErrorCode::parse_error, "config needs an integer array \"dims\"");
        for (const auto& d : doc["dims"]) config.dims.push_back(d.get<int>());

        int l = 0;
        if (doc.contains("h_metric") && !doc["h_metric"].empty()) {
            const auto& hm = doc["h_metric"];
            l = int(hm.size());
            config.h_metric = MatD(l, l);
            for (int i = 0; i < l; ++i) {
                if ((int)hm[i].size() != l)
                    fail(ErrorCode::parse_error, "h_metric must be a square matrix");
                for (int j = 0; j < l; ++j)
                    config.h_metric.at(i, j) = hm[i][j].get<double>();
            }
        } else {
            config.h_metric = MatD(0, 0);
        }

        if (doc.contains("branes")) {
            for (const auto& jb : doc["branes"]) {
                Brane br;
                br.color = jb.value("color", std::string("a"));
                br.type = parse_type(jb.value("type", std::string("electric")));
                if (!jb.contains("index_set"))
                    fail(ErrorCode::parse_error, "each brane needs an \"index_set\"");
                for (const auto& i : jb["index_set"]) br.index_set.push_back(i.get<int>());
                std::sort(br.index_set.begin(), br.index_set.end());
                if (jb.contains("lambda"))
                    for (const auto& x : jb["lambda"]) br.lambda.push_back(x.get<double>());
                br.epsilon = jb.value("epsilon", -1);
                br.charge = jb.value("charge", 1.0);
                config.branes.push_back(std::move(br));
            }
        }
        if (doc.contains("preset")) config.preset_name = doc["preset"].get<std::string>();
        validate_config(config);
        return config;
    } catch (const json::exception& e) {
        fail(ErrorCode::parse_error, std::string("config field error: ") + e.what());
    }
}

BraneConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io_error, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const BraneConfig& config) {
    json doc;
    doc["dims"] = config.dims;
    if (config.l() > 0) {
        json hm = json::array();
        for (int i = 0; i < config.l(); ++i) {
            json row = json::array();
            for (int j = 0; j < config.l(); ++j) row.push_back(config.h_metric.at(i, j));
            hm.push_back(row);
        }
        doc["h_metric"] = hm;
    }
    json branes = json::array();
    for (const Brane& br : config.branes) {
        json jb;
        jb["color"] = br.color;
        jb["type"] = br.type == BraneType::electric ? "electric" : "magnetic";
        jb["index_set"] = br.index_set;
        jb["lambda"] = br.lambda;
        jb["epsilon"] = br.epsilon;
        jb["charge"] = br.charge;
        branes.push_back(jb);
    }
    doc["branes"] = branes;
    if (config.preset_name) doc["preset"] = *config.preset_name;
    return doc.dump(2);
}

} // namespace tobra
