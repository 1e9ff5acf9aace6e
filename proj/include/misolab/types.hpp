#ifndef MISOLAB_TYPES_HPP
#define MISOLAB_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace misolab {

using cdbl = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// A user is addressed by its cell and its index within the cell.
/// Single-user networks always use user == 0.
struct UserId {
    int cell = 0;
    int user = 0;

    friend bool operator==(const UserId& a, const UserId& b) {
        return a.cell == b.cell && a.user == b.user;
    }
    friend bool operator!=(const UserId& a, const UserId& b) { return !(a == b); }
    friend bool operator<(const UserId& a, const UserId& b) {
        return a.cell != b.cell ? a.cell < b.cell : a.user < b.user;
    }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool is_finite(const CVec& v) {
    return v.allFinite();
}

inline bool is_finite(const CMat& m) {
    return m.allFinite();
}

} // namespace misolab

#endif
