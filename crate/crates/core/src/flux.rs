//! Scalar flux functions and classical two-point numerical fluxes.

/// Physical flux `f(u)` of a scalar conservation law `u_t + f(u)_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFlux {
    /// Linear advection `f(u) = a u`.
    Advection { speed: f64 },
    /// Inviscid Burgers `f(u) = u^2 / 2`.
    Burgers,
}

impl ScalarFlux {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            ScalarFlux::Advection { speed } => speed * u,
            ScalarFlux::Burgers => 0.5 * u * u,
        }
    }

    /// Characteristic speed `f'(u)`.
    #[inline]
    pub fn speed(&self, u: f64) -> f64 {
        match *self {
            ScalarFlux::Advection { speed } => speed,
            ScalarFlux::Burgers => u,
        }
    }

    /// Largest `|f'(u)|` over `[lo, hi]`. Both fluxes have monotone `f'`,
    /// so the endpoints suffice.
    pub fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        self.speed(lo).abs().max(self.speed(hi).abs())
    }

    /// Godunov flux: the exact Riemann flux at the interface.
    pub fn godunov(&self, ul: f64, ur: f64) -> f64 {
        match *self {
            ScalarFlux::Advection { speed } => {
                if speed >= 0.0 {
                    speed * ul
                } else {
                    speed * ur
                }
            }
            ScalarFlux::Burgers => {
                if ul <= ur {
                    // rarefaction (or constant): minimise over [ul, ur]
                    if ul > 0.0 {
                        self.eval(ul)
                    } else if ur < 0.0 {
                        self.eval(ur)
                    } else {
                        0.0
                    }
                } else {
                    // shock: maximise over [ur, ul]
                    self.eval(ul).max(self.eval(ur))
                }
            }
        }
    }

    /// Classical (unsplit) Lax-Friedrichs flux with dissipation speed `alpha`.
    #[inline]
    pub fn lax_friedrichs(&self, ul: f64, ur: f64, alpha: f64) -> f64 {
        0.5 * (self.eval(ul) + self.eval(ur)) - 0.5 * alpha * (ur - ul)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn godunov_matches_upwinding_for_advection() {
        let f = ScalarFlux::Advection { speed: 2.0 };
        assert_eq!(f.godunov(1.0, 5.0), 2.0);
        let g = ScalarFlux::Advection { speed: -1.0 };
        assert_eq!(g.godunov(1.0, 5.0), -5.0);
    }

    #[test]
    fn godunov_burgers_cases() {
        let f = ScalarFlux::Burgers;
        assert_eq!(f.godunov(1.0, 2.0), 0.5);
        assert_eq!(f.godunov(-2.0, -1.0), 0.5);
        assert_eq!(f.godunov(-1.0, 1.0), 0.0); // transonic rarefaction
        assert_eq!(f.godunov(2.0, -3.0), 4.5); // shock moving left
        assert_eq!(f.godunov(3.0, 1.0), 4.5);
    }

    #[test]
    fn fluxes_are_consistent() {
        let f = ScalarFlux::Burgers;
        for u in [-1.5, -0.2, 0.0, 0.7, 3.0] {
            assert_eq!(f.godunov(u, u), f.eval(u));
            assert_eq!(f.lax_friedrichs(u, u, 4.0), f.eval(u));
        }
    }
}
