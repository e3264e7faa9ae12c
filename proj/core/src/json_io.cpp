#include "soficlab/json_io.hpp"

#include <json.hpp>

namespace sofic {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw JsonError("malformed JSON");
    return j;
}

// Missing keys and type mismatches surface as JsonError, not as the json
// library's own exception type.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw JsonError(std::string(what) + ": " + e.what());
    }
}

Rational rational_from(const json& j, const char* what) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational::from_decimal(j.get<double>());
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw JsonError(std::string(what) + ": bad rational '" + s + "'");
        }
    }
    throw JsonError(std::string(what) + ": expected a number or 'num/den' string");
}

GroupElement element_from(const json& j, const Group& g, const char* what) {
    try {
        switch (g.kind()) {
            case GroupKind::Integers:
                if (j.is_number_integer()) return GroupElement::integer(j.get<std::int64_t>());
                if (j.is_array() && j.size() == 1)
                    return GroupElement::integer(j[0].get<std::int64_t>());
                break;
            case GroupKind::Lattice:
            case GroupKind::FiniteAbelian:
                if (j.is_array())
                    return g.normalized(GroupElement::vec(j.get<std::vector<std::int64_t>>()));
                break;
            case GroupKind::Free:
                if (j.is_array()) return GroupElement::word(j.get<std::vector<std::int64_t>>());
                break;
        }
    } catch (const json::exception&) {
    }
    throw JsonError(std::string(what) + ": bad group element");
}

Group group_from(const json& j) {
    if (!j.is_object() || !j.contains("group")) throw JsonError("group descriptor needs 'group'");
    std::string name = j.at("group").get<std::string>();
    if (name == "Z") return Group::integers();
    if (name == "Z^k") return Group::lattice(j.at("k").get<int>());
    if (name == "F_k") return Group::free_group(j.at("k").get<int>());
    if (name == "Z/m") return Group::finite_abelian(j.at("moduli").get<std::vector<std::int64_t>>());
    throw JsonError("unknown group '" + name + "'");
}

} // namespace

Group parse_group(const std::string& text) {
    return guarded("group descriptor", [&] { return group_from(parse(text)); });
}

SoficApprox parse_sofic_approx(const std::string& text) {
    return guarded("model descriptor", [&] {
        json j = parse(text);
        if (j.contains("model")) {
            std::string model = j.at("model").get<std::string>();
            if (model == "cyclic") return SoficApprox::cyclic(j.at("d").get<std::int64_t>());
            if (model == "torus")
                return SoficApprox::torus(j.at("dims").get<std::vector<std::int64_t>>());
            if (model == "regular")
                return SoficApprox::regular_abelian(j.at("moduli").get<std::vector<std::int64_t>>());
            if (model == "free_random")
                return SoficApprox::random_free(j.at("k").get<int>(), j.at("d").get<std::int64_t>(),
                                                j.at("seed").get<std::uint64_t>());
            throw JsonError("unknown model '" + model + "'");
        }
        // Group-style descriptor: the standard model for each group.
        std::string name = j.at("group").get<std::string>();
        if (name == "Z") return SoficApprox::cyclic(j.at("d").get<std::int64_t>());
        if (name == "Z^k") return SoficApprox::torus(j.at("dims").get<std::vector<std::int64_t>>());
        if (name == "Z/m")
            return SoficApprox::regular_abelian(j.at("moduli").get<std::vector<std::int64_t>>());
        if (name == "F_k")
            return SoficApprox::random_free(j.at("k").get<int>(), j.at("d").get<std::int64_t>(),
                                            j.at("seed").get<std::uint64_t>());
        throw JsonError("unknown group '" + name + "'");
    });
}

std::string sofic_approx_json(const SoficApprox& sigma) {
    json j;
    j["group"] = sigma.group().name();
    j["d"] = sigma.size();
    j["extension"] = sigma.extension_rule();
    json gens = json::array();
    for (const auto& p : sigma.generator_perms()) gens.push_back(p);
    j["generators"] = std::move(gens);
    return j.dump();
}

ShiftSystem parse_system(const std::string& text) {
    return guarded("system descriptor", [&] {
        json j = parse(text);
        Group g = j.contains("group") && j.at("group").is_object()
                      ? group_from(j.at("group"))
                      : (j.contains("group") ? group_from(json{{"group", j.at("group")}})
                                             : Group::integers());
        Alphabet b;
        for (const auto& letter : j.at("alphabet")) b.letters.push_back(letter.get<std::string>());
        const json& law = j.at("law");
        if (law.contains("iid")) {
            std::vector<Rational> probs;
            for (const auto& p : law.at("iid")) probs.push_back(rational_from(p, "iid law"));
            return ShiftSystem::iid(std::move(g), std::move(b), std::move(probs));
        }
        if (law.contains("markov")) {
            const json& mk = law.at("markov");
            std::vector<std::vector<Rational>> P;
            for (const auto& row : mk.at("P")) {
                std::vector<Rational> r;
                for (const auto& p : row) r.push_back(rational_from(p, "Markov row"));
                P.push_back(std::move(r));
            }
            if (mk.contains("pi")) {
                std::vector<Rational> pi;
                for (const auto& p : mk.at("pi")) pi.push_back(rational_from(p, "Markov pi"));
                return ShiftSystem::markov(std::move(b), std::move(P), std::move(pi));
            }
            return ShiftSystem::markov(std::move(b), std::move(P));
        }
        throw JsonError("system law must be 'iid' or 'markov'");
    });
}

Observable parse_observable(const std::string& text, const ShiftSystem& sys) {
    return guarded("observable descriptor", [&] {
        json j = parse(text);
        Observable o;
        o.base_size = sys.alphabet().size();
        for (const auto& w : j.at("window"))
            o.window.push_back(element_from(w, sys.group(), "observable window"));
        for (const auto& letter : j.at("codomain")) o.codomain.letters.push_back(letter.get<std::string>());
        if (j.contains("allow_unreachable")) o.allow_unreachable = j.at("allow_unreachable").get<bool>();

        auto letter_index = [](const std::vector<std::string>& letters, const std::string& name,
                               const char* what) {
            for (std::size_t i = 0; i < letters.size(); ++i)
                if (letters[i] == name) return i;
            throw JsonError(std::string(what) + ": unknown letter '" + name + "'");
        };

        std::size_t table_size = 1;
        for (std::size_t i = 0; i < o.window.size(); ++i) table_size *= o.base_size;
        o.table.assign(table_size, 0);
        std::vector<bool> filled(table_size, false);
        for (const auto& [key, value] : j.at("table").items()) {
            // Key: comma-joined base letters, window order.
            std::vector<std::size_t> letters;
            std::size_t start = 0;
            while (start <= key.size()) {
                auto comma = key.find(',', start);
                std::string piece = key.substr(start, comma == std::string::npos ? std::string::npos
                                                                                 : comma - start);
                letters.push_back(letter_index(sys.alphabet().letters, piece, "observable table key"));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (letters.size() != o.window.size())
                throw JsonError("observable table key arity mismatch: '" + key + "'");
            std::size_t idx = 0, stride = 1;
            for (std::size_t i = 0; i < letters.size(); ++i) {
                idx += letters[i] * stride;
                stride *= o.base_size;
            }
            o.table[idx] = static_cast<std::uint8_t>(
                letter_index(o.codomain.letters, value.get<std::string>(), "observable table value"));
            filled[idx] = true;
        }
        for (bool f : filled)
            if (!f) throw JsonError("observable table is not total");
        o.validate();
        return o;
    });
}

std::vector<GroupElement> parse_element_list(const std::string& text, const Group& g) {
    return guarded("element list", [&] {
        json j = parse(text);
        if (!j.is_array()) throw JsonError("expected an array of group elements");
        std::vector<GroupElement> out;
        for (const auto& e : j) out.push_back(element_from(e, g, "element list"));
        return out;
    });
}

GroupRingElement parse_group_ring(const std::string& text) {
    return guarded("ring descriptor", [&] {
        json j = parse(text);
        Group g = j.contains("group") && j.at("group").is_object()
                      ? group_from(j.at("group"))
                      : group_from(json{{"group", j.at("group")}});
        std::size_t n = j.contains("n") ? j.at("n").get<std::size_t>() : 1;
        GroupRingElement f = GroupRingElement::scalar(g, n);
        for (const auto& entry : j.at("entries")) {
            std::size_t l = entry.contains("l") ? entry.at("l").get<std::size_t>() : 0;
            std::size_t s = entry.contains("s") ? entry.at("s").get<std::size_t>() : 0;
            for (const auto& term : entry.at("support"))
                f.add_term(l, s, element_from(term.at("x"), g, "ring support"),
                           term.at("c").get<std::int64_t>());
        }
        return f;
    });
}

std::string conjugation_report_json(const ConjugationReport& report) {
    json j;
    j["permutation"] = report.p;
    j["mismatch_fraction"] = report.mismatch_fraction;
    json defects = json::object();
    for (const auto& [g, v] : report.commutation_defects) defects[std::to_string(g)] = v;
    j["commutation_defects"] = std::move(defects);
    j["matched_tiles"] = report.matched_tiles;
    j["total_tiles"] = report.total_tiles;
    j["patch_fraction"] = report.patch_fraction;
    j["achieved_patch_bound"] = report.achieved_patch_bound;
    if (report.membership_checked) {
        j["phi_member"] = report.phi_member;
        j["psi_member"] = report.psi_member;
        j["phi_distance"] = report.phi_distance;
        j["psi_distance"] = report.psi_distance;
    }
    return j.dump();
}

std::string canonical_json(const std::string& text) {
    // nlohmann objects iterate in sorted key order, so dump() is canonical.
    return parse(text).dump();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace sofic
