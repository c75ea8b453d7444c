// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "thinkbudget/budget.hpp"
#include "thinkbudget/domain.hpp"
#include "thinkbudget/gateway.hpp"
#include "thinkbudget/simulator.hpp"
#include "thinkbudget/tokenizer.hpp"
#include "thinkbudget/truncation.hpp"

namespace thinkbudget {

/// One model invocation as the runner sees it.
struct InferenceCall {
    const ModelSpec& model;
    const QuestionRecord& question;
    std::string prompt;
    /// Budget governing this call, already capped by effective_budget.
    BudgetSpec budget;
    /// Forward the budget as the native API parameter.
    bool native = false;
};

/// NoThinking -> 0, Tokens(k) -> k, Unlimited -> absent.
std::optional<std::uint64_t> native_budget_parameter(const BudgetSpec& budget);

class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual ChatResponse complete(const InferenceCall& call) = 0;
};

/// Sends calls to an OpenAI-compatible endpoint.
class GatewayBackend final : public ModelBackend {
public:
    explicit GatewayBackend(std::shared_ptr<Gateway> gateway) : gateway_(std::move(gateway)) {}
    ChatResponse complete(const InferenceCall& call) override;

    ChatRequest build_request(const InferenceCall& call) const;

private:
    std::shared_ptr<Gateway> gateway_;
};

/// Answers calls with simulate_complete. The call's prompt is ignored; the
/// input-token count is measured on the budget-free question prompt so
/// Stage-1 and Stage-3 calls agree on the trace length.
class SimulatedBackend final : public ModelBackend {
public:
    SimulatedBackend(Tokenizer tok, PromptTemplate prompt_template)
        : tok_(std::move(tok)), template_(std::move(prompt_template)) {}

    void add_model(SimulatedModel model);
    bool has_model(const std::string& name) const { return models_.contains(name); }

    ChatResponse complete(const InferenceCall& call) override;

private:
    Tokenizer tok_;
    PromptTemplate template_;
    std::map<std::string, SimulatedModel> models_;
};

/// Stage 1: one uncapped request (thinking_budget = T_max for native models)
/// split by extract_think. Traces with empty thinking are valid and carry
/// had_think_tags=false when the tags were missing.
ReasoningTrace generate_unconstrained(const ModelSpec& model, const QuestionRecord& question, ModelBackend& backend,
                                      const Tokenizer& tok, const PromptTemplate& prompt_template);

} // namespace thinkbudget
