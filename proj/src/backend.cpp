// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/backend.hpp"

#include "thinkbudget/errors.hpp"

namespace thinkbudget {

std::optional<std::uint64_t> native_budget_parameter(const BudgetSpec& budget) {
    if (budget.is_unlimited()) return std::nullopt;
    return budget.limit();
}

ChatRequest GatewayBackend::build_request(const InferenceCall& call) const {
    ChatRequest request;
    request.model = call.model.name;
    request.messages.push_back(ChatMessage{Role::User, call.prompt});
    request.temperature = gateway_->endpoint().temperature;
    if (call.native) request.thinking_budget = native_budget_parameter(call.budget);
    return request;
}

ChatResponse GatewayBackend::complete(const InferenceCall& call) { return gateway_->complete(build_request(call)).response; }

void SimulatedBackend::add_model(SimulatedModel model) {
    model.validate();
    auto name = model.spec.name;
    models_.insert_or_assign(std::move(name), std::move(model));
}

ChatResponse SimulatedBackend::complete(const InferenceCall& call) {
    auto it = models_.find(call.model.name);
    if (it == models_.end()) throw PlanError("no simulated model named '" + call.model.name + "'");
    const auto input_tokens = tok_.count(reconstruct_prompt(call.question, {}, template_));
    return simulate_complete(it->second, call.question, call.budget, input_tokens, tok_);
}

ReasoningTrace generate_unconstrained(const ModelSpec& model, const QuestionRecord& question, ModelBackend& backend,
                                      const Tokenizer& tok, const PromptTemplate& prompt_template) {
    InferenceCall call{model, question, reconstruct_prompt(question, {}, prompt_template),
                       effective_budget(BudgetSpec::unlimited(), model), model.native_budget_support};
    const ChatResponse response = backend.complete(call);
    const SplitResult split = extract_think(response.content);

    ReasoningTrace trace;
    trace.raw = response.content;
    trace.thinking = split.thinking;
    trace.answer_text = split.remainder;
    trace.thinking_tokens = tok.count(trace.thinking);
    trace.input_tokens = tok.count(call.prompt);
    trace.had_think_tags = split.had_open_tag;
    return trace;
}

} // namespace thinkbudget
