//! LSTM layer: forward dynamics over a sequence and backpropagation through time.
//!
//! Gate order everywhere (storage, flattening, checkpoints) is input, forget,
//! cell candidate, output.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{axpy, dot, Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Cell = 2,
    Output = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Cell, Gate::Output];

    pub fn suffix(self) -> &'static str {
        match self {
            Gate::Input => "i",
            Gate::Forget => "f",
            Gate::Cell => "c",
            Gate::Output => "o",
        }
    }
}

/// Weights of one LSTM layer: per gate an input matrix `W_g` (hidden × input),
/// a recurrent matrix `U_g` (hidden × hidden) and a bias `b_g`.
///
/// The same type carries gradients during backpropagation.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmLayerParams<T> {
    input_dim: usize,
    hidden_dim: usize,
    w: [Matrix<T>; 4],
    u: [Matrix<T>; 4],
    b: [Vector<T>; 4],
}

/// Hidden and cell state after one step.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmState<T> {
    pub h: Vector<T>,
    pub c: Vector<T>,
}

impl<T: Scalar> LstmState<T> {
    pub fn zeros(hidden_dim: usize) -> Self {
        Self {
            h: Vector::zeros(hidden_dim),
            c: Vector::zeros(hidden_dim),
        }
    }
}

/// Gate activations of a single step, kept for the backward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct CellCache<T> {
    pub input_gate: Vector<T>,
    pub forget_gate: Vector<T>,
    pub candidate: Vector<T>,
    pub output_gate: Vector<T>,
}

/// Everything a sequence forward pass retains for BPTT.
#[derive(Clone, Debug)]
pub struct LstmTrace<T> {
    inputs: Matrix<T>,
    /// Post-activation gates, one (steps × hidden) matrix per gate.
    gates: [Matrix<T>; 4],
    cells: Matrix<T>,
    tanh_cells: Matrix<T>,
    hidden: Matrix<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceMode {
    LastOutput,
    FullSequence,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceOutput<T> {
    Last(Vector<T>),
    Full(Matrix<T>),
}

impl<T: Scalar> LstmLayerParams<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dim,
            w: std::array::from_fn(|_| Matrix::zeros(hidden_dim, input_dim)),
            u: std::array::from_fn(|_| Matrix::zeros(hidden_dim, hidden_dim)),
            b: std::array::from_fn(|_| Vector::zeros(hidden_dim)),
        }
    }

    /// `4·h·(h + d + 1)`
    pub fn count_for(input_dim: usize, hidden_dim: usize) -> usize {
        4 * hidden_dim * (hidden_dim + input_dim + 1)
    }

    pub fn param_count(&self) -> usize {
        Self::count_for(self.input_dim, self.hidden_dim)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn w(&self, g: Gate) -> &Matrix<T> {
        &self.w[g as usize]
    }

    pub fn u(&self, g: Gate) -> &Matrix<T> {
        &self.u[g as usize]
    }

    pub fn b(&self, g: Gate) -> &Vector<T> {
        &self.b[g as usize]
    }

    pub fn w_mut(&mut self, g: Gate) -> &mut [T] {
        self.w[g as usize].as_mut_slice()
    }

    pub fn u_mut(&mut self, g: Gate) -> &mut [T] {
        self.u[g as usize].as_mut_slice()
    }

    pub fn b_mut(&mut self, g: Gate) -> &mut [T] {
        self.b[g as usize].as_mut_slice()
    }

    /// Named parameter blocks in canonical order: all `W`, all `U`, all `b`.
    pub(crate) fn blocks(&self) -> Vec<(String, Vec<usize>, &[T])> {
        let mut out = Vec::with_capacity(12);
        for g in Gate::ALL {
            out.push((
                format!("W_{}", g.suffix()),
                vec![self.hidden_dim, self.input_dim],
                self.w(g).as_slice(),
            ));
        }
        for g in Gate::ALL {
            out.push((
                format!("U_{}", g.suffix()),
                vec![self.hidden_dim, self.hidden_dim],
                self.u(g).as_slice(),
            ));
        }
        for g in Gate::ALL {
            out.push((format!("b_{}", g.suffix()), vec![self.hidden_dim], self.b(g).as_slice()));
        }
        out
    }

    pub(crate) fn blocks_mut(&mut self) -> Vec<&mut [T]> {
        let Self { w, u, b, .. } = self;
        w.iter_mut()
            .map(Matrix::as_mut_slice)
            .chain(u.iter_mut().map(Matrix::as_mut_slice))
            .chain(b.iter_mut().map(Vector::as_mut_slice))
            .collect()
    }

    /// One step from raw slices, writing activations into `gates_out[g]`,
    /// the new cell state into `c_out`, `tanh(c)` into `tc_out` and the new
    /// hidden state into `h_out`.
    #[allow(clippy::too_many_arguments)]
    fn step_into(
        &self,
        x: &[T],
        h_prev: &[T],
        c_prev: &[T],
        gates_out: [&mut [T]; 4],
        c_out: &mut [T],
        tc_out: &mut [T],
        h_out: &mut [T],
    ) {
        let [gi, gf, gc, go] = gates_out;
        for k in 0..self.hidden_dim {
            let pre = |g: Gate| {
                self.b[g as usize][k] + dot(self.w[g as usize].row(k), x) + dot(self.u[g as usize].row(k), h_prev)
            };
            gi[k] = pre(Gate::Input).sigmoid();
            gf[k] = pre(Gate::Forget).sigmoid();
            gc[k] = pre(Gate::Cell).tanh();
            go[k] = pre(Gate::Output).sigmoid();
            c_out[k] = gf[k] * c_prev[k] + gi[k] * gc[k];
            tc_out[k] = c_out[k].tanh();
            h_out[k] = go[k] * tc_out[k];
        }
    }

    fn check_step_shapes(&self, x: &Vector<T>, prev: &LstmState<T>) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Shape {
                op: "lstm_cell_forward(x)",
                left: (self.hidden_dim, self.input_dim),
                right: (x.len(), 1),
            });
        }
        if prev.h.len() != self.hidden_dim || prev.c.len() != self.hidden_dim {
            return Err(Error::Shape {
                op: "lstm_cell_forward(state)",
                left: (self.hidden_dim, self.hidden_dim),
                right: (prev.h.len(), prev.c.len()),
            });
        }
        Ok(())
    }

    /// Runs the layer over `inputs` (steps × input_dim) from a zero state and
    /// keeps every intermediate needed by [`Self::backward`].
    pub fn forward_trace(&self, inputs: &Matrix<T>) -> Result<LstmTrace<T>> {
        if inputs.cols() != self.input_dim {
            return Err(Error::Shape {
                op: "lstm_sequence_forward",
                left: (self.hidden_dim, self.input_dim),
                right: inputs.shape(),
            });
        }
        let steps = inputs.rows();
        if steps == 0 {
            return Err(Error::argument("lstm_sequence_forward: empty sequence"));
        }
        let h = self.hidden_dim;
        let mut gates: [Matrix<T>; 4] = std::array::from_fn(|_| Matrix::zeros(steps, h));
        let mut cells = Matrix::zeros(steps, h);
        let mut tanh_cells = Matrix::zeros(steps, h);
        let mut hidden = Matrix::zeros(steps, h);
        let zeros = vec![T::zero(); h];
        let mut h_prev = zeros.clone();
        let mut c_prev = zeros;
        for t in 0..steps {
            let [gi, gf, gc, go] = &mut gates;
            self.step_into(
                inputs.row(t),
                &h_prev,
                &c_prev,
                [gi.row_mut(t), gf.row_mut(t), gc.row_mut(t), go.row_mut(t)],
                cells.row_mut(t),
                tanh_cells.row_mut(t),
                hidden.row_mut(t),
            );
            h_prev.copy_from_slice(hidden.row(t));
            c_prev.copy_from_slice(cells.row(t));
        }
        Ok(LstmTrace {
            inputs: inputs.clone(),
            gates,
            cells,
            tanh_cells,
            hidden,
        })
    }

    /// Backpropagation through time.
    ///
    /// `d_hidden` holds dL/dh_t for every step (rows for steps whose output is
    /// unused are zero). Returns the parameter gradients and dL/dx_t.
    pub fn backward(&self, trace: &LstmTrace<T>, d_hidden: &Matrix<T>) -> Result<(Self, Matrix<T>)> {
        let steps = trace.steps();
        let h = self.hidden_dim;
        if trace.hidden.cols() != h || trace.inputs.cols() != self.input_dim {
            return Err(Error::State(format!(
                "LSTM trace for ({}, {}) does not belong to a layer of ({}, {})",
                trace.inputs.cols(),
                trace.hidden.cols(),
                self.input_dim,
                h
            )));
        }
        if d_hidden.shape() != (steps, h) {
            return Err(Error::Shape {
                op: "lstm backward",
                left: (steps, h),
                right: d_hidden.shape(),
            });
        }

        let mut grads = Self::zeros(self.input_dim, h);
        let mut d_inputs = Matrix::zeros(steps, self.input_dim);
        let mut dh_next = vec![T::zero(); h];
        let mut dc_next = vec![T::zero(); h];
        let mut dh_prev = vec![T::zero(); h];
        // Pre-activation gradients, one buffer per gate.
        let mut da: [Vec<T>; 4] = std::array::from_fn(|_| vec![T::zero(); h]);
        let zeros = vec![T::zero(); h];
        let one = T::one();

        for t in (0..steps).rev() {
            let (h_prev, c_prev) = if t == 0 {
                (&zeros[..], &zeros[..])
            } else {
                (trace.hidden.row(t - 1), trace.cells.row(t - 1))
            };
            let gi = trace.gates[0].row(t);
            let gf = trace.gates[1].row(t);
            let gc = trace.gates[2].row(t);
            let go = trace.gates[3].row(t);
            let tc = trace.tanh_cells.row(t);
            let dh_in = d_hidden.row(t);

            for k in 0..h {
                let dh = dh_in[k] + dh_next[k];
                let d_o = dh * tc[k];
                let dc = dc_next[k] + dh * go[k] * (one - tc[k] * tc[k]);
                let d_f = dc * c_prev[k];
                let d_i = dc * gc[k];
                let d_c = dc * gi[k];
                dc_next[k] = dc * gf[k];
                da[0][k] = d_i * gi[k] * (one - gi[k]);
                da[1][k] = d_f * gf[k] * (one - gf[k]);
                da[2][k] = d_c * (one - gc[k] * gc[k]);
                da[3][k] = d_o * go[k] * (one - go[k]);
            }

            let x = trace.inputs.row(t);
            let dx = d_inputs.row_mut(t);
            dh_prev.iter_mut().for_each(|v| *v = T::zero());
            for (g, da_g) in da.iter().enumerate() {
                let gw = grads.w[g].as_mut_slice();
                let gu = grads.u[g].as_mut_slice();
                let gb = grads.b[g].as_mut_slice();
                let w = &self.w[g];
                let u = &self.u[g];
                for (k, &a) in da_g.iter().enumerate() {
                    if a == T::zero() {
                        continue;
                    }
                    gb[k] += a;
                    axpy(a, x, &mut gw[k * self.input_dim..(k + 1) * self.input_dim]);
                    axpy(a, h_prev, &mut gu[k * h..(k + 1) * h]);
                    axpy(a, w.row(k), dx);
                    axpy(a, u.row(k), &mut dh_prev);
                }
            }
            std::mem::swap(&mut dh_next, &mut dh_prev);
        }
        Ok((grads, d_inputs))
    }
}

impl<T: Scalar> LstmTrace<T> {
    pub fn steps(&self) -> usize {
        self.hidden.rows()
    }

    /// Hidden states, one row per step.
    pub fn hidden(&self) -> &Matrix<T> {
        &self.hidden
    }

    pub fn cells(&self) -> &Matrix<T> {
        &self.cells
    }

    pub fn gate(&self, g: Gate) -> &Matrix<T> {
        &self.gates[g as usize]
    }

    pub fn last_hidden(&self) -> Vector<T> {
        Vector::from(self.hidden.row(self.steps() - 1).to_vec())
    }

    pub fn last_state(&self) -> LstmState<T> {
        let t = self.steps() - 1;
        LstmState {
            h: Vector::from(self.hidden.row(t).to_vec()),
            c: Vector::from(self.cells.row(t).to_vec()),
        }
    }
}

/// A single LSTM step.
pub fn lstm_cell_forward<T: Scalar>(
    x: &Vector<T>,
    prev: &LstmState<T>,
    params: &LstmLayerParams<T>,
) -> Result<(LstmState<T>, CellCache<T>)> {
    params.check_step_shapes(x, prev)?;
    let h = params.hidden_dim;
    let mut gates: [Vec<T>; 4] = std::array::from_fn(|_| vec![T::zero(); h]);
    let mut c = vec![T::zero(); h];
    let mut tc = vec![T::zero(); h];
    let mut hidden = vec![T::zero(); h];
    {
        let [gi, gf, gc, go] = &mut gates;
        params.step_into(
            x.as_slice(),
            prev.h.as_slice(),
            prev.c.as_slice(),
            [gi, gf, gc, go],
            &mut c,
            &mut tc,
            &mut hidden,
        );
    }
    let [gi, gf, gc, go] = gates;
    Ok((
        LstmState {
            h: Vector::from(hidden),
            c: Vector::from(c),
        },
        CellCache {
            input_gate: gi.into(),
            forget_gate: gf.into(),
            candidate: gc.into(),
            output_gate: go.into(),
        },
    ))
}

/// Runs the layer over `seq` (steps × input_dim) from a zero state.
pub fn lstm_sequence_forward<T: Scalar>(
    seq: &Matrix<T>,
    params: &LstmLayerParams<T>,
    mode: SequenceMode,
) -> Result<SequenceOutput<T>> {
    let trace = params.forward_trace(seq)?;
    Ok(match mode {
        SequenceMode::LastOutput => SequenceOutput::Last(trace.last_hidden()),
        SequenceMode::FullSequence => SequenceOutput::Full(trace.hidden),
    })
}
