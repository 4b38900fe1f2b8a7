#pragma once

#include <span>
#include <string>
#include <vector>

#include "peal/design.hpp"

namespace peal {

// Payments per year allowed for a component.
bool allowed_frequency(int omega);
// Months between payments: 12 / omega.
int payment_period(int omega);

struct FrequencySchedule {
    std::vector<int> omega;  // one entry per vertical component

    static FrequencySchedule uniform(const WaterfallDesign& d, int omega);
    // Frequency per horizontal component, taken from its first vertical component.
    static FrequencySchedule per_hc(const WaterfallDesign& d, std::span<const int> hc_omega);
    int hc_frequency(const WaterfallDesign& d, int hc) const;
};

// Vertical, multiple and horizontal rules, plus the alignment of TP with
// every payment period in use.
std::vector<Violation> validate_frequencies(const WaterfallDesign& d, const FrequencySchedule& fs, Month tp);

// Window sums of cf ending on multiples of the payment period; month 0 is a
// payment month paying cf(0).
Series freq_transform(std::span<const Amount> cf, int omega);

struct GrossDimensioning {
    std::vector<Series> gv;  // per VC
    std::vector<Series> gc;  // per cost position
    std::vector<Series> gn;  // per note position
    std::vector<Series> gh;  // per HC: the GDM columns
    std::vector<Series> hc;  // monthly HC_j before the transform; may be empty
};

GrossDimensioning gross_dimension(const WaterfallDesign& d, const DesignSeries& ds, const FrequencySchedule& fs);

struct GCheck {
    std::vector<std::vector<double>> g;  // g_i(t) per VC
    bool pass = true;
    std::vector<Violation> failures;
};

// Payment-month ratio test. A month passes when |GV_i - v_i GH_j| stays within
// the rounding slack of one minor unit per aggregated month. When the monthly
// HC series are known, v_i is the HC-weighted mean of v_i over the payment
// window of the HC's frequency, which is v_i(t) whenever v is flat there.
GCheck g_check(const GrossDimensioning& gross, const WaterfallDesign& d, const FrequencySchedule& fs);

Series total_gross_position(const std::vector<Series>& gdm);

// t,GH1..GHH
std::string gdm_to_csv(const std::vector<Series>& gdm);

}  // namespace peal
