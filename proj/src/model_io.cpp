#include "cgid/model_io.hpp"

#include <algorithm>

#include "cgid/error.hpp"

namespace cgid {

nlohmann::json model_to_json(const DiscreteSEM& m) {
    nlohmann::json j;
    j["format"] = "cgid-model/1";
    auto latents = nlohmann::json::array();
    for (const auto& lat : m.latents) {
        latents.push_back({{"name", lat.name},
                           {"children", {lat.children.first, lat.children.second}},
                           {"card", lat.card},
                           {"marginal", lat.marginal}});
    }
    j["latents"] = std::move(latents);
    auto nodes = nlohmann::json::array();
    for (const auto& cpt : m.cpts) {
        std::vector<std::string> latent_names;
        for (std::size_t l : cpt.latents) latent_names.push_back(m.latents[l].name);
        nodes.push_back({{"name", cpt.node},
                         {"card", cpt.card},
                         {"parents", cpt.parents},
                         {"latents", latent_names},
                         {"cpt", cpt.rows}});
    }
    j["nodes"] = std::move(nodes);
    return j;
}

DiscreteSEM model_from_json(const nlohmann::json& j, const CausalGraph& g) {
    try {
        if (j.value("format", "") != "cgid-model/1") throw EvalError("unsupported model format");
        DiscreteSEM m;
        m.graph = g;

        std::vector<NodeId> vars;
        std::vector<int> cards;
        for (const auto& node : j.at("nodes")) {
            vars.push_back(node.at("name").get<std::string>());
            cards.push_back(node.at("card").get<int>());
        }
        m.observed = Domain(vars, cards);

        for (const auto& lj : j.at("latents")) {
            LatentFactor lat;
            lat.name = lj.at("name").get<std::string>();
            auto kids = lj.at("children").get<std::vector<std::string>>();
            if (kids.size() != 2) throw EvalError("latent " + lat.name + " needs exactly two children");
            lat.children = make_bidirected(kids[0], kids[1]);
            lat.card = lj.at("card").get<int>();
            lat.marginal = lj.at("marginal").get<std::vector<double>>();
            m.latents.push_back(std::move(lat));
        }

        for (const auto& node : j.at("nodes")) {
            Cpt cpt;
            cpt.node = node.at("name").get<std::string>();
            cpt.card = node.at("card").get<int>();
            cpt.parents = node.at("parents").get<std::vector<std::string>>();
            for (const auto& name : node.at("latents").get<std::vector<std::string>>()) {
                auto it = std::find_if(m.latents.begin(), m.latents.end(),
                                       [&](const LatentFactor& l) { return l.name == name; });
                if (it == m.latents.end()) throw EvalError("unknown latent '" + name + "'");
                cpt.latents.push_back(static_cast<std::size_t>(it - m.latents.begin()));
            }
            cpt.rows = node.at("cpt").get<std::vector<std::vector<double>>>();
            for (const auto& p : cpt.parents) {
                if (std::find(vars.begin(), vars.end(), p) == vars.end())
                    throw EvalError("unknown parent '" + p + "' of " + cpt.node);
            }
            m.cpts.push_back(std::move(cpt));
        }
        m.index();
        if (auto why = m.check(true); !why.empty()) throw EvalError("invalid model: " + why);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw EvalError(std::string("malformed model JSON: ") + e.what());
    }
}

}  // namespace cgid
