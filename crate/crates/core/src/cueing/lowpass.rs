//! Second-order low-pass with unit DC gain,
//! `H(s) = ωn² / (s² + 2ζωn·s + ωn²)`, discretized by zero-order hold.

/// State-transition matrix `e^{A·h}` for `A = [[0, 1], [−ωn², −2ζωn]]`.
fn transition(natfreq: f64, damping: f64, h: f64) -> [[f64; 2]; 2] {
    // e^{At} = e^{st}·[c(t)·I + k(t)·(A − sI)] with s = tr(A)/2 and
    // d² = s² − det(A); c, k are cosh/sinh, cos/sin or 1/t depending on d².
    let a = [[0.0, 1.0], [-natfreq * natfreq, -2.0 * damping * natfreq]];
    let s = -damping * natfreq;
    let d2 = s * s - natfreq * natfreq;
    let (c, k) = if d2.abs() <= 1e-12 * natfreq * natfreq {
        (1.0, h)
    } else if d2 > 0.0 {
        let d = d2.sqrt();
        ((d * h).cosh(), (d * h).sinh() / d)
    } else {
        let d = (-d2).sqrt();
        ((d * h).cos(), (d * h).sin() / d)
    };
    let e = (s * h).exp();
    [
        [e * (c + k * (a[0][0] - s)), e * k * a[0][1]],
        [e * k * a[1][0], e * (c + k * (a[1][1] - s))],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderLowPass {
    natfreq_radps: f64,
    damping: f64,
    // (output, output rate); None until the first sample arrives
    state: Option<[f64; 2]>,
    cached: Option<(f64, [[f64; 2]; 2])>,
}

impl SecondOrderLowPass {
    pub fn new(natfreq_radps: f64, damping: f64) -> Self {
        assert!(natfreq_radps > 0.0 && damping > 0.0);
        Self {
            natfreq_radps,
            damping,
            state: None,
            cached: None,
        }
    }

    pub fn output(&self) -> Option<f64> {
        self.state.map(|s| s[0])
    }

    pub fn reset(&mut self) {
        self.state = None;
    }

    /// Advances by `dt_s` holding `input` constant over the step. The first
    /// call initializes the output to `input` at rest.
    pub fn step(&mut self, input: f64, dt_s: f64) -> f64 {
        debug_assert!(dt_s > 0.0);
        let Some([y, yd]) = self.state else {
            self.state = Some([input, 0.0]);
            return input;
        };
        let phi = match self.cached {
            Some((h, phi)) if h == dt_s => phi,
            _ => {
                let phi = transition(self.natfreq_radps, self.damping, dt_s);
                self.cached = Some((dt_s, phi));
                phi
            }
        };
        // the equilibrium for a held input u is (u, 0)
        let e0 = y - input;
        let next = [
            input + phi[0][0] * e0 + phi[0][1] * yd,
            phi[1][0] * e0 + phi[1][1] * yd,
        ];
        self.state = Some(next);
        next[0]
    }
}
