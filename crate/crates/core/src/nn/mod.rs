//! Recurrent and dense layers with hand-derived backward passes.

pub mod dense;
pub mod dropout;
pub mod init;
pub mod lstm;
pub mod model;
pub mod rnn;

pub use dense::{dense_sigmoid_forward, DenseParams};
pub use dropout::{dropout_forward, DropoutMask, Mode};
pub use init::init_params;
pub use lstm::{
    lstm_cell_forward, lstm_sequence_forward, CellCache, Gate, LstmLayerParams, LstmState, LstmTrace, SequenceMode,
    SequenceOutput,
};
pub use model::{
    param_count, ForwardCache, LayerCount, Model, ModelConfig, ModelParams, ModelVariant, ParamBlock, ParamCount,
    CANONICAL_SEQ_LEN,
};
pub use rnn::{rnn_cell_backward, rnn_cell_forward, rnn_output, RnnLayerParams, RnnStepGrads};
