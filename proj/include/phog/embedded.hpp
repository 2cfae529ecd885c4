#pragma once

// Copies of configs/schema.json and configs/presets.json; test_config checks they stay identical.

namespace phog::embedded {

inline constexpr const char* schema = R"json(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "phog scenario",
  "type": "object",
  "additionalProperties": false,
  "required": ["solver"],
  "properties": {
    "solver": {"type": "string", "enum": ["exact", "diagonal", "analytics", "linearized", "multimode", "trajectories", "nlse", "feasibility"]},
    "description": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0},
    "threads": {"type": "integer", "minimum": 1},
    "output": {"type": "string"},
    "device": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "units": {"type": "string", "enum": ["scaled", "per_m"]},
        "g_a": {"type": "number", "exclusiveMinimum": 0},
        "g_b": {"type": "number", "minimum": 0},
        "optimal_ratio": {"type": "boolean"},
        "kerr_U": {"type": "number", "minimum": 0},
        "gamma1": {"type": "number", "minimum": 0},
        "gamma_c": {"type": "number", "minimum": 0},
        "gamma_c_default": {"type": "string", "enum": ["total_decay_4G", "tail_only_4G"]},
        "Gamma": {"type": "number", "exclusiveMinimum": 0},
        "tail_length": {"type": "integer", "minimum": 0},
        "tail_coupling": {"type": "number", "minimum": 0}
      }
    },
    "time": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "t_end": {"type": "number", "minimum": 0},
        "x_end": {"type": "number", "minimum": 0},
        "samples": {"type": "integer", "minimum": 2},
        "t_values": {"type": "array", "items": {"type": "number", "minimum": 0}}
      }
    },
    "initial": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "n0": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "amplitudes": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
      }
    },
    "runs": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "properties": {
          "n0": {"type": "number", "minimum": 0},
          "gamma1": {"type": "number", "minimum": 0},
          "gamma2_scale": {"type": "number", "minimum": 0},
          "tail_length": {"type": "integer", "minimum": 0}
        }
      }
    },
    "exact": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "task": {"type": "string", "enum": ["evolve", "pair_generation"]},
        "model": {"type": "string", "enum": ["full", "three_mode", "two_mode", "single_mode"]},
        "basis": {"type": "string", "enum": ["modal", "collective"]},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        "observables": {"type": "array", "items": {"type": "string"}},
        "p_max": {"type": "integer", "minimum": 1},
        "rtol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "diagonal": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "rtol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "analytics": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "diagonal_check": {"type": "boolean"}
      }
    },
    "linearized": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "task": {"type": "string", "enum": ["single_mode", "negativity"]},
        "coefficients": {"type": "string", "enum": ["derived", "printed"]},
        "with_exact": {"type": "boolean"},
        "negativity_model": {"type": "string", "enum": ["two_mode", "three_mode"]},
        "log_base": {"type": "number", "exclusiveMinimum": 1},
        "rtol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "multimode": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "tail_as_decay": {"type": "boolean"},
        "plateau_threshold": {"type": "number"},
        "rtol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "trajectories": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "n_traj": {"type": "integer", "minimum": 1},
        "model": {"type": "string", "enum": ["full", "three_mode", "two_mode", "single_mode"]},
        "basis": {"type": "string", "enum": ["modal", "collective"]},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        "observables": {"type": "array", "items": {"type": "string"}},
        "compare_diagonal": {"type": "boolean"},
        "rtol": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "nlse": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "g_a_per_m": {"type": "number", "minimum": 0},
        "g_b_per_m": {"type": "number", "minimum": 0},
        "g_c_per_m": {"type": "number", "minimum": 0},
        "tail_length": {"type": "integer", "minimum": 0},
        "gamma_nl_per_W_m": {"type": "number", "minimum": 0},
        "beta2_s2_per_m": {"type": "number"},
        "alpha_per_m": {"type": "number", "minimum": 0},
        "lambda0_m": {"type": "number", "exclusiveMinimum": 0},
        "fwhm_s": {"type": "number", "exclusiveMinimum": 0},
        "length_m": {"type": "number", "exclusiveMinimum": 0},
        "n_samples": {"type": "integer", "minimum": 16},
        "window_fwhm": {"type": "number", "exclusiveMinimum": 0},
        "self_steepening": {"type": "boolean"},
        "z_samples": {"type": "integer", "minimum": 2},
        "energies_J": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "step_fraction": {"type": "number", "exclusiveMinimum": 0},
        "dz_m": {"type": "number", "minimum": 0}
      }
    },
    "platform": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "name": {"type": "string"},
        "lambda_m": {"type": "number", "exclusiveMinimum": 0},
        "n_eff": {"type": "number", "exclusiveMinimum": 0},
        "T_eff_s": {"type": "number", "exclusiveMinimum": 0},
        "n2_m2_per_W": {"type": "number", "exclusiveMinimum": 0},
        "A_eff_m2": {"type": "number", "exclusiveMinimum": 0},
        "gamma_nl_per_W_m": {"type": "number", "exclusiveMinimum": 0},
        "loss_db_per_m": {"type": "number", "minimum": 0}
      }
    },
    "feasibility": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "preset": {"type": "string"},
        "g_a_per_m": {"type": "number", "exclusiveMinimum": 0},
        "length_m": {"type": "number", "exclusiveMinimum": 0},
        "gamma_c_per_m": {"type": "number", "minimum": 0},
        "samples": {"type": "integer", "minimum": 2}
      }
    }
  }
}
)json";

inline constexpr const char* presets = R"json(
{
  "bulk-glass": {"name": "bulk-glass", "lambda_m": 1.06e-6, "n_eff": 2.59, "T_eff_s": 1e-13, "n2_m2_per_W": 3e-18, "A_eff_m2": 3e-10, "loss_db_per_m": 50},
  "fiber": {"name": "fiber", "lambda_m": 8.08e-7, "n_eff": 1.45, "T_eff_s": 1e-13, "gamma_nl_per_W_m": 8.51e-3, "loss_db_per_m": 3.5e-3},
  "nanowire": {"name": "nanowire", "lambda_m": 1.064e-6, "n_eff": 3.5, "T_eff_s": 1e-13, "gamma_nl_per_W_m": 300, "loss_db_per_m": 500}
}
)json";

}  // namespace phog::embedded
