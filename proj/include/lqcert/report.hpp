#pragma once

// JSON views of the analysis results. Finite numbers are rounded to 12
// significant digits so reports are byte-stable; non-finite values are
// written as the strings "inf", "-inf" or "nan".

#include "lqcert/bounds.hpp"
#include "lqcert/lemmas.hpp"
#include "lqcert/nsp.hpp"
#include "lqcert/rip.hpp"
#include "lqcert/solver.hpp"

#include <json.hpp>

namespace lqcert::report {

nlohmann::json number(double v);

nlohmann::json to_json(const rip::RipReport& r);
nlohmann::json to_json(const rip::Rescaled& r);
nlohmann::json to_json(const rip::UniqueDetermination& u);
nlohmann::json to_json(const nsp::NspReport& r);
nlohmann::json to_json(const nsp::QsEstimate& e);
nlohmann::json to_json(const bounds::AValueResult& a);
nlohmann::json to_json(const bounds::RecoveryConstants& c);
nlohmann::json to_json(const bounds::QTildeResult& r);
nlohmann::json to_json(const bounds::QFailResult& r);
nlohmann::json to_json(const lemmas::SuiteReport& r);

/// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace lqcert::report
