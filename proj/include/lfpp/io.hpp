#pragma once

// Text artifacts of the experiment drivers. All numeric output goes through
// format_g (12 significant digits, locale independent), so files produced for
// equal inputs are byte identical regardless of platform locale or threads.

#include <string>

#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/multiscale.hpp"
#include "lfpp/totalvar.hpp"

namespace lfpp {

// shortest-of-fixed/scientific with 12 significant digits, like printf %.12g
// in the C locale
std::string format_g(double v);

// step penalty spec `levels=a,b,c;breaks=0,t1,t2,T`; exactly those two
// clauses in that order, strictly increasing breaks, positive levels, one
// more break than levels. Throws usage_error with a message otherwise.
StepPenalty parse_penalty(const std::string& spec);

// `# region=<M>x<N> seed=<s> replicate=<r>` header, then x,y,value rows in
// row-major order (y outer)
std::string field_csv(const FieldSample& s);

// N,replicate,value rows of the raw scan observations
std::string scan_csv(const ExponentFit& fit);

// {gamma, sizes, slope, stderr, seed}
std::string scan_json(const ExponentFit& fit);

// {penalty, lambda_star, n_paths, seed, mean_phi_strategy, mean_phi_oracle,
//  integral_inv_lambda, se_strategy, se_oracle}; penalty is an array of
// [from, to, level] triples
std::string tv_json(const StrategyReport& rep);

// level,replicate,d,d_join,switches rows
std::string multiscale_csv(const MultiscaleReport& rep);

// per-level stats objects mirroring LevelStats plus the run summary and the
// configuration echo
std::string multiscale_json(const MultiscaleReport& rep,
                            const MultiscaleConfig& cfg);

}  // namespace lfpp
