#include "mcf/class_spec.hpp"

#include "mcf/error.hpp"

namespace mcf {

std::vector<std::string> validate_class_spec(const ClassSpec& spec)
{
    std::vector<std::string> out = validate_vocabulary(spec.vocab);
    for (auto& v : validate_formula(spec.sentence, spec.vocab, /*require_closed=*/true))
        out.push_back(std::move(v));
    return out;
}

ClassSpec make_class_spec(Vocabulary vocab, Formula sentence)
{
    ClassSpec spec{std::move(vocab), std::move(sentence)};
    auto violations = validate_class_spec(spec);
    if (!violations.empty()) {
        std::string msg = "invalid class spec:";
        for (const auto& v : violations)
            msg += "\n  " + v;
        throw ValidationError(msg);
    }
    return spec;
}

std::set<std::string> relation_names(const Vocabulary& vocab)
{
    std::set<std::string> out;
    for (const auto& r : vocab.relations)
        out.insert(r.name);
    return out;
}

} // namespace mcf
