#pragma once

// Named exponent specs used by tests, experiments, and the CLI. The corpus is
// chosen to exercise both verdicts of every condition check:
//   * constants and smooth decaying profiles that satisfy everything,
//   * a log-decay profile that is log-Holder continuous but decays to its
//     limit too slowly for the inverse-square conditions,
//   * a 1/r tail (radial table) that also decays too slowly,
//   * a hyperplane jump that fails local log-Holder continuity outright.

#include <stdexcept>
#include <vector>

#include "gaussvar/exponent.hpp"

namespace gaussvar {

inline const std::vector<ExponentSpec>& exponent_registry() {
    static const std::vector<ExponentSpec> reg = [] {
        std::vector<ExponentSpec> v;

        auto push = [&](ExponentSpec s) {
            validate(s);
            v.push_back(std::move(s));
        };

        {
            ExponentSpec s;
            s.name = "const_2";
            s.kind = ExponentKind::constant;
            s.dim = 1;
            s.value = 2.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "const_4";
            s.kind = ExponentKind::constant;
            s.dim = 1;
            s.value = 4.0;
            s.clip_lo = 1.5;
            s.clip_hi = 8.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_square";
            s.kind = ExponentKind::p_inf_plus_inverse_square;
            s.dim = 1;
            s.p_inf = 2.0;
            s.coeff = 1.0;
            s.clip_lo = 1.5;
            s.clip_hi = 3.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_square_neg";
            s.kind = ExponentKind::p_inf_plus_inverse_square;
            s.dim = 1;
            s.p_inf = 2.5;
            s.coeff = -0.5;
            s.clip_lo = 1.6;
            s.clip_hi = 4.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_square_wide";
            s.kind = ExponentKind::p_inf_plus_inverse_square;
            s.dim = 1;
            s.p_inf = 2.5;
            s.coeff = 2.0;
            s.clip_lo = 1.2;
            s.clip_hi = 6.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_log";
            s.kind = ExponentKind::p_inf_plus_inverse_log;
            s.dim = 1;
            s.p_inf = 2.0;
            s.coeff = 1.0;
            s.clip_lo = 1.5;
            s.clip_hi = 3.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_abs_tail";  // 3 on [0,1], then 2 + 1/r
            s.kind = ExponentKind::radial_table;
            s.dim = 1;
            s.table.r = {0.0, 1.0};
            s.table.p = {3.0, 3.0};
            s.table.p_inf = 2.0;
            s.table.tail_power = 1.0;
            s.clip_lo = 1.5;
            s.clip_hi = 3.5;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "table_bump";  // piecewise-linear bump, constant tail
            s.kind = ExponentKind::radial_table;
            s.dim = 1;
            s.table.r = {0.0, 1.0, 2.0, 3.0};
            s.table.p = {2.2, 2.8, 2.4, 2.4};
            s.table.p_inf = 2.4;
            s.table.tail_power = 2.0;
            s.clip_lo = 1.5;
            s.clip_hi = 4.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "step_jump";
            s.kind = ExponentKind::step_jump;
            s.dim = 1;
            s.jump_lo = 2.0;
            s.jump_hi = 3.0;
            s.jump_normal = {1.0};
            s.jump_offset = 0.0;
            s.clip_lo = 1.5;
            s.clip_hi = 4.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_square_2d";
            s.kind = ExponentKind::p_inf_plus_inverse_square;
            s.dim = 2;
            s.p_inf = 2.0;
            s.coeff = 1.0;
            s.clip_lo = 1.5;
            s.clip_hi = 3.0;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "inv_log_2d";
            s.kind = ExponentKind::p_inf_plus_inverse_log;
            s.dim = 2;
            s.p_inf = 2.2;
            s.coeff = 0.8;
            s.clip_lo = 1.5;
            s.clip_hi = 3.2;
            push(s);
        }
        {
            ExponentSpec s;
            s.name = "step_jump_2d";
            s.kind = ExponentKind::step_jump;
            s.dim = 2;
            s.jump_lo = 1.8;
            s.jump_hi = 2.6;
            s.jump_normal = {M_SQRT1_2, M_SQRT1_2};
            s.jump_offset = 0.3;
            s.clip_lo = 1.5;
            s.clip_hi = 4.0;
            push(s);
        }
        return v;
    }();
    return reg;
}

inline const ExponentSpec& find_exponent(const std::string& name) {
    for (const auto& s : exponent_registry())
        if (s.name == name) return s;
    throw std::invalid_argument("find_exponent: unknown exponent '" + name + "'");
}

}  // namespace gaussvar
