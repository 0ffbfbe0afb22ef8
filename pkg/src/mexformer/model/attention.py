"""Scaled dot-product self-attention and its multi-head form"""

from __future__ import annotations

from typing import List, Mapping, Optional, Tuple, Union

from mexformer.numerics import Tensor, concat, linear, matmul, scale, softmax, take_slice, transpose


def self_attention(
    tokens: Tensor,
    query: Tensor,
    key: Tensor,
    value: Tensor,
    denominator: float,
    query_bias: Optional[Tensor] = None,
    key_bias: Optional[Tensor] = None,
    value_bias: Optional[Tensor] = None,
    return_attention: bool = False,
) -> Union[Tensor, Tuple[Tensor, Tensor]]:
    """One attention head: ``softmax(QKᵀ / denominator) · V``.

    Args:
        tokens: n×D input Z
        query, key, value: D×D_m projections W_Q, W_K, W_V
        denominator: divisor of the logits (√D or √D_m)
        query_bias, key_bias, value_bias: optional length-D_m biases
        return_attention: also return the n×n row-stochastic attention matrix

    Returns:
        n×D_m output, or (output, attention)
    """
    queries = linear(tokens, query, query_bias)
    keys = linear(tokens, key, key_bias)
    values = linear(tokens, value, value_bias)
    attention = softmax(scale(matmul(queries, transpose(keys)), 1.0 / denominator), axis=-1)
    output = matmul(attention, values)
    if return_attention:
        return output, attention
    return output


def multi_head(
    tokens: Tensor,
    weights: Mapping[str, Tensor],
    heads: int,
    denominator: float,
    return_attention: bool = False,
) -> Union[Tensor, Tuple[Tensor, List[Tensor]]]:
    """MSM(Z) = Concat(SA_1(Z), …, SA_M(Z)) · W_O.

    Head ``h`` uses columns ``h·D_m … (h+1)·D_m`` of the stacked D×D query, key and
    value projections (and the matching bias entries).

    Args:
        tokens: n×D input
        weights: ``attn`` scope with ``{query,key,value,output}.{weight,bias}``
        heads: M, which must divide D
        denominator: divisor of the attention logits
        return_attention: also return the M attention matrices
    """
    width = weights["query.weight"].shape[1]
    head_width = width // heads
    outputs, attentions = [], []
    for head in range(heads):
        start, stop = head * head_width, (head + 1) * head_width
        projections = {
            name: (
                take_slice(weights[f"{name}.weight"], start, stop, axis=1),
                take_slice(weights[f"{name}.bias"], start, stop, axis=0),
            )
            for name in ("query", "key", "value")
        }
        output, attention = self_attention(
            tokens,
            projections["query"][0],
            projections["key"][0],
            projections["value"][0],
            denominator,
            query_bias=projections["query"][1],
            key_bias=projections["key"][1],
            value_bias=projections["value"][1],
            return_attention=True,
        )
        outputs.append(output)
        attentions.append(attention)
    joined = outputs[0] if heads == 1 else concat(outputs, axis=1)
    result = linear(joined, weights["output.weight"], weights["output.bias"])
    if return_attention:
        return result, attentions
    return result
