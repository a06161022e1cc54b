#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paragraph/ast.hpp"

namespace paragraph {

enum class VariantKind { Cpu, CpuCollapse, Gpu, GpuCollapse, GpuMem, GpuCollapseMem };

const char* variant_kind_name(VariantKind k);
std::optional<VariantKind> variant_kind_from_name(const std::string& name);
bool variant_requires_collapse(VariantKind k);
bool variant_is_gpu(VariantKind k);

struct DataArray {
    std::string name;
    std::string element_type;  // int | float | double
    std::string extent;        // expression over the kernel's size parameters
    std::string direction;     // to | from | tofrom
};

/// A serial kernel eligible for directive insertion. The kernel region is
/// the first top-level for loop of the function named kernel_name.
struct KernelSpec {
    std::string kernel_name;
    std::string source;
    int loop_nest_depth = 1;
    bool collapsible = false;
    std::vector<DataArray> data_arrays;
};

struct VariantParams {
    std::map<std::string, long long> sizes;  // int scalar parameter -> value
    long long num_teams = 1;
    long long num_threads = 1;
};

struct KernelVariant {
    VariantKind kind = VariantKind::Cpu;
    std::string source;  // kernel with exactly one OpenMP directive
    VariantParams params;
};

/// Loads a kernel spec document and validates it: the source must parse,
/// the named function and its loop must exist, and a spec declared
/// collapsible must actually have a perfectly nested loop pair.
KernelSpec kernel_spec_from_json(const nlohmann::json& doc);
nlohmann::json kernel_spec_to_json(const KernelSpec& spec);

/// First top-level ForStmt in the function named kernel_name (the
/// insertion point for directives). Throws VariantError if absent.
NodeId find_kernel_loop(const Ast& ast, const std::string& kernel_name);

/// True iff the loop body is a CompoundStmt containing exactly one inner
/// ForStmt whose init/cond/inc never reference the outer induction
/// variable.
bool detect_collapsible(const Ast& ast, NodeId kernel_loop);

/// The directive text for one variant kind (no trailing newline).
std::string variant_directive(const KernelSpec& spec, VariantKind kind, const VariantParams& params);

/// Inserts the directive line before the kernel loop. Throws VariantError
/// when kind requires a collapsible kernel and the spec is not.
KernelVariant generate_variant(const KernelSpec& spec, VariantKind kind, const VariantParams& params);

/// Self-contained C harness (kernel + timing main) that prints
/// "KERNEL_TIME_US=<n>". Written next to each variant for external
/// executors; uses headers outside the frontend's subset.
std::string generate_harness(const KernelSpec& spec, const KernelVariant& variant);

/// Cartesian product of applicable kinds and grids. Collapse kinds are
/// skipped for non-collapsible kernels; cpu kinds ignore teams_grid.
std::vector<KernelVariant> enumerate_dataset_points(const KernelSpec& spec,
                                                    const std::vector<long long>& size_grid,
                                                    const std::vector<long long>& teams_grid,
                                                    const std::vector<long long>& threads_grid);

/// Size-parameter names: int scalar parameters of the kernel signature.
std::vector<std::string> size_parameter_names(const KernelSpec& spec);

}  // namespace paragraph
