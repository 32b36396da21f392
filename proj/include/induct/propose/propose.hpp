#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <variant>

#include "induct/concept_model.hpp"
#include "induct/io.hpp"
#include "induct/prior.hpp"
#include "induct/propose/client.hpp"
#include "induct/propose/rules.hpp"
#include "induct/propose/templates.hpp"

namespace induct::propose {

struct StaticPool {
    std::filesystem::path path;
};

struct ClientBackend {
    std::shared_ptr<CompletionClient> client;
    int concurrency = 1;
};

using Backend = std::variant<StaticPool, ClientBackend>;

inline constexpr int kRulesPerList = 10;

/// Requests issued for one proposal call. Repeated draws differ only in `sample`,
/// so a smaller budget reuses a prefix of a larger one.
inline std::vector<CompletionRequest> proposal_requests(const ProposalRequest& req, const std::string& model) {
    if (req.budget < 1) throw ConfigError("proposal budget must be at least 1");
    CompletionRequest base;
    base.model = model;
    base.prompt = build_prompt(req);
    base.temperature = req.temperature;
    base.seed = req.seed;
    int count = req.budget;
    switch (req.domain) {
        case ProposalDomain::number:
        case ProposalDomain::ablation_unconditioned:
            base.stop = {"\n"};
            base.max_tokens = 32;
            base.logprobs = true;
            break;
        case ProposalDomain::shape_first_order:
            base.max_tokens = 1024;
            count = (req.budget + kRulesPerList - 1) / kRulesPerList;
            break;
        case ProposalDomain::shape_propositional: base.max_tokens = 64; break;
        case ProposalDomain::shape_first_batch:
            base.temperature = 0.0;
            base.max_tokens = 2048;
            count = 1;
            break;
    }
    std::vector<CompletionRequest> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(base);
        out.back().sample = i;
    }
    return out;
}

struct ProposedText {
    std::string nl;
    std::optional<double> logq;
};

/// Turns raw completions into at most `budget` candidate texts, in request order.
inline std::vector<ProposedText> extract_proposals(const ProposalRequest& req,
                                                   const std::vector<std::vector<Completion>>& raw) {
    std::vector<ProposedText> out;
    const auto budget = static_cast<std::size_t>(req.budget);
    switch (req.domain) {
        case ProposalDomain::number:
        case ProposalDomain::ablation_unconditioned:
            for (const auto& cs : raw)
                for (const auto& c : cs) {
                    auto nl = first_line_concept(c.text);
                    if (!nl.empty() && out.size() < budget)
                        out.push_back({std::move(nl), req.domain == ProposalDomain::number ? c.logprob : std::nullopt});
                }
            break;
        case ProposalDomain::shape_first_order: {
            std::vector<std::vector<std::string>> lists;
            for (const auto& cs : raw)
                for (const auto& c : cs) lists.push_back(parse_rule_list(c.text));
            for (auto& nl : round_robin_take(lists, budget)) out.push_back({std::move(nl), std::nullopt});
            break;
        }
        case ProposalDomain::shape_propositional:
            for (const auto& cs : raw)
                for (const auto& c : cs) {
                    auto rules = parse_prefixed_rules(c.text);
                    if (!rules.empty() && out.size() < budget) out.push_back({rules.front(), std::nullopt});
                }
            break;
        case ProposalDomain::shape_first_batch:
            for (const auto& cs : raw)
                for (const auto& c : cs)
                    for (auto& r : parse_prefixed_rules(c.text))
                        if (out.size() < budget) out.push_back({std::move(r), std::nullopt});
            break;
    }
    return out;
}

inline CompletionRequest translation_request(std::string_view nl, ConceptDomain domain, const std::string& model) {
    CompletionRequest r;
    r.model = model;
    r.prompt = translation_prompt(domain, nl);
    r.temperature = 0.0;
    r.max_tokens = 160;
    r.stop = {"\n"};
    return r;
}

/// Greedy NL to DSL translation. Text that fails to parse comes back as Unparsed.
inline std::variant<ConceptProgram, Unparsed> translate_nl_to_dsl(std::string_view nl, ConceptDomain domain,
                                                                  CompletionClient& client) {
    const auto cs = client.complete(translation_request(nl, domain, client.model()));
    const std::string src = cs.empty() ? std::string() : trim(lines_of(cs.front().text).front());
    try {
        return parse_concept(domain, src);
    } catch (const SyntaxError& e) {
        return Unparsed{src, e.what()};
    }
}

inline Hypothesis make_translated(const ProposedText& p, ConceptDomain domain, CompletionClient& client,
                                  std::optional<int> batch) {
    Hypothesis h;
    h.nl_text = canonicalize_nl(p.nl);
    h.program = translate_nl_to_dsl(p.nl, domain, client);
    h.proposal_logprob = p.logq;
    h.source_batch = batch;
    return h;
}

inline std::vector<Hypothesis> propose(const ProposalRequest& req, const Backend& backend) {
    const ConceptDomain domain = concept_domain(req.domain);
    std::vector<Hypothesis> out;
    if (const auto* pool = std::get_if<StaticPool>(&backend)) {
        for (auto& h : io::read_pool_jsonl(pool->path, domain)) {
            if (out.size() == static_cast<std::size_t>(req.budget)) break;
            h.nl_text = canonicalize_nl(h.nl_text);
            if (req.source_batch) h.source_batch = req.source_batch;
            out.push_back(std::move(h));
        }
    } else {
        const auto& cb = std::get<ClientBackend>(backend);
        if (!cb.client) throw BackendUnavailable("no completion client configured");
        const auto raw = complete_all(*cb.client, proposal_requests(req, cb.client->model()), cb.concurrency);
        for (const auto& p : extract_proposals(req, raw))
            out.push_back(make_translated(p, domain, *cb.client, req.source_batch));
    }
    if (out.empty()) throw EmptyPool("proposal source returned no hypotheses");
    return out;
}

/// log p(C) under a text model, keyed by canonical NL; each distinct text scored once.
inline std::map<std::string, double> score_nl_prior(const std::vector<std::string>& nl_list, ConceptDomain domain,
                                                    CompletionClient& client, std::string_view extra_prefix = {}) {
    std::map<std::string, double> scores;
    for (const auto& nl : nl_list) {
        const auto key = canonicalize_nl(nl);
        if (scores.count(key)) continue;
        CompletionRequest r;
        r.kind = "score";
        r.model = client.model();
        r.prompt = std::string(extra_prefix) + prior_prefix(domain);
        r.continuation = domain == ConceptDomain::shape ? strip_positive_prefix(nl) : trim(nl);
        r.temperature = 0.0;
        r.max_tokens = 0;
        const auto cs = client.complete(r);
        if (cs.empty() || !cs.front().logprob)
            throw MissingLogprobSupport("backend returned no log-probability for '" + key + "'");
        scores[key] = *cs.front().logprob;
    }
    return scores;
}

}  // namespace induct::propose
