// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace risisac {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using cplx = std::complex<double>;
using CVec = Vec<cplx>;
using CMat = Mat<cplx>;
using RVec = Vec<double>;
using RMat = Mat<double>;

// Column-major vectorization. This is the one convention used everywhere
// in the library: vec(A X B) = (B^T kron A) vec(X).
template <typename Derived>
Vec<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    Mat<Scalar> tmp = m;  // force column-major dense storage
    return Eigen::Map<const Vec<Scalar>>(tmp.data(), tmp.size());
}

template <typename Derived>
Mat<typename Derived::Scalar> unvec(const Eigen::MatrixBase<Derived>& v, Eigen::Index rows,
                                    Eigen::Index cols)
{
    using Scalar = typename Derived::Scalar;
    if (v.cols() != 1 || v.rows() != rows * cols)
        throw std::invalid_argument("unvec: vector length does not match rows*cols");
    Vec<Scalar> tmp = v;
    return Eigen::Map<const Mat<Scalar>>(tmp.data(), rows, cols);
}

template <typename DerivedA, typename DerivedB>
Mat<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b)
{
    static_assert(std::is_same_v<typename DerivedA::Scalar, typename DerivedB::Scalar>,
                  "kron: scalar types must agree");
    Mat<typename DerivedA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Real-valued [Re; Im] stacking of a complex vector, and its inverse.
template <typename Derived>
Vec<typename Derived::Scalar::value_type> realify(const Eigen::MatrixBase<Derived>& z)
{
    using Real = typename Derived::Scalar::value_type;
    Vec<Real> out(2 * z.size());
    out.head(z.size()) = z.real();
    out.tail(z.size()) = z.imag();
    return out;
}

template <typename Derived>
Vec<std::complex<typename Derived::Scalar>> complexify(const Eigen::MatrixBase<Derived>& x)
{
    using Real = typename Derived::Scalar;
    if (x.size() % 2 != 0)
        throw std::invalid_argument("complexify: odd length");
    const Eigen::Index n = x.size() / 2;
    Vec<std::complex<Real>> out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out(i) = {x(i), x(n + i)};
    return out;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace risisac
