#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dppoll/field.hpp"

namespace dppoll {

using SignalIndex = std::uint32_t;

/// Signal 0 is reserved for the constant 1.
inline constexpr SignalIndex kOneSignal = 0;

enum class Visibility { Public, Private };

struct UnknownSignal : std::runtime_error {
    explicit UnknownSignal(SignalIndex id)
        : std::runtime_error("constraint references unallocated signal " + std::to_string(id)) {}
};
struct LengthMismatch : std::runtime_error {
    LengthMismatch() : std::runtime_error("witness length does not match signal count") {}
};

/// Sparse linear combination over signals; terms kept sorted by signal index
/// with merged duplicates and no zero coefficients, so identical combinations
/// compare equal and builds are deterministic.
class LinearCombination {
  public:
    using Term = std::pair<SignalIndex, FieldElement>;

    LinearCombination() = default;
    LinearCombination(const FieldElement& constant);
    LinearCombination(std::uint64_t constant) : LinearCombination(FieldElement(constant)) {}
    static LinearCombination signal(SignalIndex id, const FieldElement& coeff = FieldElement(1));

    LinearCombination operator+(const LinearCombination& o) const;
    LinearCombination operator-(const LinearCombination& o) const;
    LinearCombination operator*(const FieldElement& scalar) const;
    LinearCombination operator-() const { return *this * (-FieldElement(1)); }
    LinearCombination& operator+=(const LinearCombination& o) { return *this = *this + o; }
    LinearCombination& operator-=(const LinearCombination& o) { return *this = *this - o; }

    FieldElement evaluate(const std::vector<FieldElement>& assignment) const;
    SignalIndex max_signal() const;
    const std::vector<Term>& terms() const { return terms_; }
    bool is_constant() const;

  private:
    std::vector<Term> terms_;
};

struct Constraint {
    LinearCombination a, b, c;  // satisfied iff <a,w> * <b,w> = <c,w>
};

struct Witness {
    std::vector<FieldElement> values;  // values[0] must be 1
};

struct SatisfactionReport {
    bool satisfied = true;
    std::size_t failing_constraint = 0;  // valid only when !satisfied
};

class ConstraintSystem {
  public:
    SignalIndex alloc(Visibility vis);
    void enforce(const LinearCombination& a, const LinearCombination& b,
                 const LinearCombination& c);

    SatisfactionReport is_satisfied(const Witness& w) const;

    std::uint32_t signal_count() const { return signal_count_; }
    std::size_t constraint_count() const { return constraints_.size(); }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<SignalIndex>& public_signals() const { return public_signals_; }

    /// JSON document with constraints as coefficient triples, hex field elements.
    std::string to_json() const;

  private:
    void check_allocated(const LinearCombination& lc) const;

    std::uint32_t signal_count_ = 1;  // index 0 = constant one
    std::vector<Constraint> constraints_;
    std::vector<SignalIndex> public_signals_;
};

/// Constraint emission with witness generation split out as hint callbacks:
/// every non-input signal carries a closure that computes its value from the
/// partial assignment, so witness generation replays allocations in order.
class CircuitBuilder {
  public:
    using Hint = std::function<FieldElement(const std::vector<FieldElement>&)>;

    SignalIndex alloc_input(Visibility vis);
    SignalIndex alloc_hinted(Visibility vis, Hint hint);

    void enforce(const LinearCombination& a, const LinearCombination& b,
                 const LinearCombination& c) {
        cs_.enforce(a, b, c);
    }
    /// Linear equality <lhs,w> = <rhs,w>, encoded as lhs * 1 = rhs.
    void enforce_equal(const LinearCombination& lhs, const LinearCombination& rhs) {
        cs_.enforce(lhs, LinearCombination(FieldElement(1)), rhs);
    }

    /// Assignments for the input signals, keyed by index; every input must be
    /// present. Hinted signals are filled in allocation order.
    Witness generate(const std::map<SignalIndex, FieldElement>& inputs) const;

    const ConstraintSystem& system() const { return cs_; }
    ConstraintSystem& system() { return cs_; }
    const std::vector<SignalIndex>& input_signals() const { return inputs_; }

  private:
    ConstraintSystem cs_;
    std::vector<std::pair<SignalIndex, Hint>> order_;  // hint empty for inputs
    std::vector<SignalIndex> inputs_;
};

// ---- Gadgets ----------------------------------------------------------

/// out = a * b.
SignalIndex gadget_mul(CircuitBuilder& b, const LinearCombination& x,
                       const LinearCombination& y);

/// bit * (bit - 1) = 0.
void enforce_boolean(CircuitBuilder& b, const LinearCombination& bit);

/// Little-endian decomposition: n boolean signals with sum(bit_i * 2^i) = input.
std::vector<SignalIndex> gadget_num2bits(CircuitBuilder& b, const LinearCombination& input,
                                         unsigned n);

/// Output constrained to sum(bit_i * 2^i); bits must already be boolean.
SignalIndex gadget_bits2num(CircuitBuilder& b, const std::vector<LinearCombination>& bits);

/// 1 iff a = 0, else 0 (inverse-witness trick).
SignalIndex gadget_is_zero(CircuitBuilder& b, const LinearCombination& a);

/// 1 iff a = b, else 0.
SignalIndex gadget_is_equal(CircuitBuilder& b, const LinearCombination& x,
                            const LinearCombination& y);

/// input = q * modulus + r with r in [0, modulus) and q range-checked to
/// bit_width bits. Returns the remainder signal. The input must fit in
/// bit_width bits at witness time.
SignalIndex gadget_modulo(CircuitBuilder& b, const LinearCombination& input,
                          std::uint64_t modulus, unsigned bit_width);

/// Enforce that the little-endian boolean signals `bits` encode a value
/// strictly below the constant bound (MSB-first scan over the bound's bits).
/// The bound is given as little-endian bits so it may equal the field
/// modulus, which has no canonical element.
void enforce_lt_constant(CircuitBuilder& b, const std::vector<LinearCombination>& bits,
                         const std::vector<bool>& bound_bits);

std::vector<bool> bits_of_u64(std::uint64_t v, unsigned n);
/// Little-endian bits of the field modulus p (254 bits).
const std::vector<bool>& modulus_bits();

inline std::vector<LinearCombination> as_lcs(const std::vector<SignalIndex>& ids) {
    std::vector<LinearCombination> out;
    out.reserve(ids.size());
    for (SignalIndex id : ids) out.push_back(LinearCombination::signal(id));
    return out;
}

}  // namespace dppoll
