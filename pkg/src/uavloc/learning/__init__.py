"""Measurement matrices, the CNN track regressor and the LSTM forecaster."""

from .autodiff import Tensor
from .checkpoint import load_model, save_model
from .gradcheck import grad_check
from .nn import CnnArchitecture, CnnModel, Seq2SeqArchitecture, Seq2SeqModel
from .phi import PhiMatrix, build_phi
from .training import (
    DatasetSplit,
    TrainConfig,
    cnn_forward,
    cnn_predict,
    lstm_forecast,
    lstm_predict,
    persistence_forecast,
    train_cnn,
    train_lstm,
)

__all__ = [
    "Tensor", "load_model", "save_model", "grad_check", "CnnArchitecture", "CnnModel",
    "Seq2SeqArchitecture", "Seq2SeqModel", "PhiMatrix", "build_phi", "DatasetSplit", "TrainConfig",
    "cnn_forward", "cnn_predict", "lstm_forecast", "lstm_predict", "persistence_forecast",
    "train_cnn", "train_lstm",
]
