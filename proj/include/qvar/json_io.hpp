#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "qvar/affine_qmap.hpp"
#include "qvar/convexity.hpp"
#include "qvar/equiint.hpp"
#include "qvar/forms.hpp"
#include "qvar/integrand.hpp"
#include "qvar/minors.hpp"
#include "qvar/qpoint.hpp"
#include "qvar/qsheet_field.hpp"

namespace qvar {

using ojson = nlohmann::ordered_json;

// Strict schema helper: rejects unknown keys, demands required ones.
void check_keys(const ojson& obj, const std::vector<std::string>& allowed,
                const std::vector<std::string>& required, const std::string& context);

ojson vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const ojson& j, const std::string& context);
ojson matrix_to_json(const Eigen::MatrixXd& M);  // nested rows
Eigen::MatrixXd matrix_from_json(const ojson& j, const std::string& context);

ojson qpoint_to_json(const QPoint& t);
QPoint qpoint_from_json(const ojson& j);

ojson affine_qmap_to_json(const AffineQMap& u);
AffineQMap affine_qmap_from_json(const ojson& j);

// Field JSON: {"m","n","Q","domain":{"center","side"},"cells_per_side",
// "vertices","matching"}; the field is canonicalized before writing.
ojson field_to_json(const QSheetField& f);
QSheetField field_from_json(const ojson& j);

ojson form_to_json(const DifferentialForm& omega);
DifferentialForm form_from_json(const ojson& j);

ojson polyaffine_to_json(const PolyaffineFn& P);
PolyaffineFn polyaffine_from_json(const ojson& j);

OptimizerConfig optimizer_from_json(const ojson& j);
ojson optimizer_to_json(const OptimizerConfig& cfg);

// {"kind":"dirichlet"} | {"kind":"quadratic","matrix":...} |
// {"kind":"family_a|family_b|family_c","g":{...}}
std::unique_ptr<QIntegrand> integrand_from_json(const ojson& j, int m, int n, int q);

QuadraticIntegrand quadratic_from_json(const ojson& j, int n, int m);

SampledFunctionSeq sampled_seq_from_json(const ojson& j);

ojson verdict_to_json(const QCVerdict& v, bool include_certificate = true);

}  // namespace qvar
