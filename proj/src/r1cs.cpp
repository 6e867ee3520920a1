#include "dppoll/r1cs.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace dppoll {

LinearCombination::LinearCombination(const FieldElement& constant) {
    if (!constant.is_zero()) terms_.push_back({kOneSignal, constant});
}

LinearCombination LinearCombination::signal(SignalIndex id, const FieldElement& coeff) {
    LinearCombination lc;
    if (!coeff.is_zero()) lc.terms_.push_back({id, coeff});
    return lc;
}

LinearCombination LinearCombination::operator+(const LinearCombination& o) const {
    LinearCombination out;
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
            out.terms_.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
            out.terms_.push_back(o.terms_[j++]);
        } else {
            FieldElement sum = terms_[i].second + o.terms_[j].second;
            if (!sum.is_zero()) out.terms_.push_back({terms_[i].first, sum});
            ++i;
            ++j;
        }
    }
    return out;
}

LinearCombination LinearCombination::operator-(const LinearCombination& o) const {
    return *this + (o * (-FieldElement(1)));
}

LinearCombination LinearCombination::operator*(const FieldElement& scalar) const {
    LinearCombination out;
    if (scalar.is_zero()) return out;
    out.terms_ = terms_;
    for (auto& t : out.terms_) t.second *= scalar;
    return out;
}

FieldElement LinearCombination::evaluate(const std::vector<FieldElement>& assignment) const {
    FieldElement acc;
    for (const auto& [id, coeff] : terms_) acc += coeff * assignment[id];
    return acc;
}

SignalIndex LinearCombination::max_signal() const {
    SignalIndex m = 0;
    for (const auto& t : terms_) m = std::max(m, t.first);
    return m;
}

bool LinearCombination::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == kOneSignal);
}

SignalIndex ConstraintSystem::alloc(Visibility vis) {
    SignalIndex id = signal_count_++;
    if (vis == Visibility::Public) public_signals_.push_back(id);
    return id;
}

void ConstraintSystem::check_allocated(const LinearCombination& lc) const {
    for (const auto& t : lc.terms()) {
        if (t.first >= signal_count_) throw UnknownSignal(t.first);
    }
}

void ConstraintSystem::enforce(const LinearCombination& a, const LinearCombination& b,
                               const LinearCombination& c) {
    check_allocated(a);
    check_allocated(b);
    check_allocated(c);
    constraints_.push_back({a, b, c});
}

SatisfactionReport ConstraintSystem::is_satisfied(const Witness& w) const {
    if (w.values.size() != signal_count_) throw LengthMismatch();
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const Constraint& c = constraints_[i];
        if (c.a.evaluate(w.values) * c.b.evaluate(w.values) != c.c.evaluate(w.values)) {
            return {false, i};
        }
    }
    return {true, 0};
}

std::string ConstraintSystem::to_json() const {
    nlohmann::json doc;
    doc["signal_count"] = signal_count_;
    doc["public_signals"] = public_signals_;
    auto terms_json = [](const LinearCombination& lc) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [id, coeff] : lc.terms()) {
            arr.push_back({{"signal", id}, {"coeff", coeff.to_hex()}});
        }
        return arr;
    };
    nlohmann::json cons = nlohmann::json::array();
    for (const Constraint& c : constraints_) {
        cons.push_back({{"a", terms_json(c.a)}, {"b", terms_json(c.b)}, {"c", terms_json(c.c)}});
    }
    doc["constraints"] = std::move(cons);
    return doc.dump();
}

SignalIndex CircuitBuilder::alloc_input(Visibility vis) {
    SignalIndex id = cs_.alloc(vis);
    order_.push_back({id, nullptr});
    inputs_.push_back(id);
    return id;
}

SignalIndex CircuitBuilder::alloc_hinted(Visibility vis, Hint hint) {
    SignalIndex id = cs_.alloc(vis);
    order_.push_back({id, std::move(hint)});
    return id;
}

Witness CircuitBuilder::generate(const std::map<SignalIndex, FieldElement>& inputs) const {
    Witness w;
    w.values.assign(cs_.signal_count(), FieldElement());
    w.values[kOneSignal] = FieldElement(1);
    for (const auto& [id, hint] : order_) {
        if (hint) {
            w.values[id] = hint(w.values);
        } else {
            auto it = inputs.find(id);
            if (it == inputs.end())
                throw std::invalid_argument("missing input for signal " + std::to_string(id));
            w.values[id] = it->second;
        }
    }
    return w;
}

// ---- Gadgets ----------------------------------------------------------

SignalIndex gadget_mul(CircuitBuilder& b, const LinearCombination& x,
                       const LinearCombination& y) {
    SignalIndex out = b.alloc_hinted(Visibility::Private, [x, y](const auto& w) {
        return x.evaluate(w) * y.evaluate(w);
    });
    b.enforce(x, y, LinearCombination::signal(out));
    return out;
}

void enforce_boolean(CircuitBuilder& b, const LinearCombination& bit) {
    b.enforce(bit, bit - LinearCombination(FieldElement(1)), LinearCombination());
}

std::vector<SignalIndex> gadget_num2bits(CircuitBuilder& b, const LinearCombination& input,
                                         unsigned n) {
    std::vector<SignalIndex> bits;
    bits.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
        SignalIndex bit = b.alloc_hinted(Visibility::Private, [input, i](const auto& w) {
            return FieldElement((std::uint64_t)(input.evaluate(w).bit(i) ? 1 : 0));
        });
        enforce_boolean(b, LinearCombination::signal(bit));
        bits.push_back(bit);
    }
    LinearCombination sum;
    FieldElement pw(1);
    for (unsigned i = 0; i < n; ++i) {
        sum += LinearCombination::signal(bits[i], pw);
        pw += pw;
    }
    b.enforce_equal(sum, input);
    return bits;
}

SignalIndex gadget_bits2num(CircuitBuilder& b, const std::vector<LinearCombination>& bits) {
    LinearCombination sum;
    FieldElement pw(1);
    for (const auto& bit : bits) {
        sum += bit * pw;
        pw += pw;
    }
    SignalIndex out =
        b.alloc_hinted(Visibility::Private, [sum](const auto& w) { return sum.evaluate(w); });
    b.enforce_equal(sum, LinearCombination::signal(out));
    return out;
}

SignalIndex gadget_is_zero(CircuitBuilder& b, const LinearCombination& a) {
    SignalIndex inv = b.alloc_hinted(Visibility::Private, [a](const auto& w) {
        FieldElement v = a.evaluate(w);
        return v.is_zero() ? FieldElement() : v.inverse();
    });
    SignalIndex out = b.alloc_hinted(Visibility::Private, [a](const auto& w) {
        return a.evaluate(w).is_zero() ? FieldElement(1) : FieldElement();
    });
    LinearCombination out_lc = LinearCombination::signal(out);
    LinearCombination inv_lc = LinearCombination::signal(inv);
    // a * inv = 1 - out;  a * out = 0;  out * inv = 0.
    // The third constraint pins inv to 0 when a = 0, so no witness slot is
    // left free (single-element tampering must always break satisfaction).
    b.enforce(a, inv_lc, LinearCombination(FieldElement(1)) - out_lc);
    b.enforce(a, out_lc, LinearCombination());
    b.enforce(out_lc, inv_lc, LinearCombination());
    return out;
}

SignalIndex gadget_is_equal(CircuitBuilder& b, const LinearCombination& x,
                            const LinearCombination& y) {
    return gadget_is_zero(b, x - y);
}

SignalIndex gadget_modulo(CircuitBuilder& b, const LinearCombination& input,
                          std::uint64_t modulus, unsigned bit_width) {
    if (modulus == 0) throw std::invalid_argument("modulo gadget: zero modulus");
    unsigned r_bits = 1;
    while ((std::uint64_t(1) << r_bits) < modulus) ++r_bits;
    SignalIndex q = b.alloc_hinted(Visibility::Private, [input, modulus](const auto& w) {
        return FieldElement(input.evaluate(w).as_u64() / modulus);
    });
    SignalIndex r = b.alloc_hinted(Visibility::Private, [input, modulus](const auto& w) {
        return FieldElement(input.evaluate(w).as_u64() % modulus);
    });
    LinearCombination q_lc = LinearCombination::signal(q);
    LinearCombination r_lc = LinearCombination::signal(r);
    b.enforce_equal(q_lc * FieldElement(modulus) + r_lc, input);
    gadget_num2bits(b, q_lc, bit_width);
    auto rbits = gadget_num2bits(b, r_lc, r_bits);
    if ((std::uint64_t(1) << r_bits) != modulus) {
        enforce_lt_constant(b, as_lcs(rbits), bits_of_u64(modulus, r_bits));
    }
    return r;
}

std::vector<bool> bits_of_u64(std::uint64_t v, unsigned n) {
    std::vector<bool> bits(n);
    for (unsigned i = 0; i < n && i < 64; ++i) bits[i] = (v >> i) & 1;
    return bits;
}

const std::vector<bool>& modulus_bits() {
    static const std::vector<bool> bits = [] {
        const auto& limbs = FieldElement::modulus_limbs();
        std::vector<bool> out(FieldElement::kModulusBits);
        for (unsigned i = 0; i < FieldElement::kModulusBits; ++i) {
            out[i] = (limbs[i / 64] >> (i % 64)) & 1;
        }
        return out;
    }();
    return bits;
}

void enforce_lt_constant(CircuitBuilder& b, const std::vector<LinearCombination>& bits,
                         const std::vector<bool>& bound_bits) {
    const unsigned n = (unsigned)bits.size();
    if (bound_bits.size() != n) throw std::invalid_argument("bound width must match bit count");
    // MSB-first scan: eq tracks prefix equality with the bound, lt picks up
    // the first position where the value's bit drops below the bound's bit.
    LinearCombination eq(FieldElement(1));
    LinearCombination lt_sum;
    for (int i = (int)n - 1; i >= 0; --i) {
        bool bound_bit = bound_bits[(std::size_t)i];
        if (bound_bit) {
            SignalIndex eq_next = gadget_mul(b, eq, bits[(std::size_t)i]);
            lt_sum += eq - LinearCombination::signal(eq_next);
            eq = LinearCombination::signal(eq_next);
        } else {
            SignalIndex eq_next =
                gadget_mul(b, eq, LinearCombination(FieldElement(1)) - bits[(std::size_t)i]);
            eq = LinearCombination::signal(eq_next);
        }
    }
    b.enforce_equal(lt_sum, LinearCombination(FieldElement(1)));
}

}  // namespace dppoll
