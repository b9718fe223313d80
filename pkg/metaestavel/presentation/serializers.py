from rest_framework import serializers

from metaestavel.core.exceptions import ExpressaoInvalidaError
from metaestavel.core.fields import parse_expression
from metaestavel.core.graded import CLASSES
from metaestavel.core.operator import GALERIA


def _validar_expressao(texto: str, dimensao: int, campo: str):
    try:
        parse_expression(texto, dimensao)
    except ExpressaoInvalidaError as exc:
        raise serializers.ValidationError({campo: exc.message})


# ====================================================================
# SERIALIZERS DOS BLOCOS DA CONFIGURAÇÃO
# ====================================================================

class OperadorSerializer(serializers.Serializer):
    """
    Operador da galeria ({galeria, parametros}) ou dado por expressões brutas
    ({f, A0, b0, c0}). As expressões são conferidas no RunConfigSerializer,
    que conhece a dimensão do domínio.
    """
    galeria = serializers.ChoiceField(choices=GALERIA, required=False)
    parametros = serializers.DictField(required=False, default=dict)
    f = serializers.CharField(required=False)
    A0 = serializers.ListField(child=serializers.ListField(child=serializers.CharField()), required=False)
    b0 = serializers.ListField(child=serializers.CharField(), required=False)
    c0 = serializers.CharField(required=False)

    def validate(self, data):
        brutos = [chave for chave in ('f', 'A0', 'b0', 'c0') if chave in data]
        if 'galeria' in data and brutos:
            raise serializers.ValidationError(
                f"Use 'galeria' ou expressões brutas, não ambos (recebido também {', '.join(brutos)})."
            )
        if 'galeria' not in data and 'f' not in data:
            raise serializers.ValidationError("Informe 'galeria' ou a expressão 'f'.")
        return data


class MalhaSerializer(serializers.Serializer):
    paisagem = serializers.ListField(child=serializers.IntegerField(min_value=3), required=False)
    validacao = serializers.ListField(child=serializers.IntegerField(min_value=3), required=False)


class ToleranciasSerializer(serializers.Serializer):
    newton = serializers.FloatField(required=False)
    degenerescencia = serializers.FloatField(required=False)
    realidade = serializers.FloatField(required=False)
    valor = serializers.FloatField(required=False)

    def validate(self, data):
        negativas = [chave for chave, valor in data.items() if not valor > 0]
        if negativas:
            raise serializers.ValidationError(f"Tolerâncias devem ser positivas: {', '.join(negativas)}.")
        return data


class HipoSerializer(serializers.Serializer):
    T = serializers.FloatField(required=False)
    C = serializers.FloatField(required=False)
    amostras = serializers.IntegerField(min_value=1, required=False)
    raio = serializers.FloatField(required=False, allow_null=True)


class SemigrupoSerializer(serializers.Serializer):
    u0 = serializers.CharField(required=False)
    delta = serializers.FloatField(required=False)
    g_mais = serializers.FloatField(required=False)
    tol_plateau = serializers.FloatField(required=False)
    tol_taxa = serializers.FloatField(required=False)

    def validate(self, data):
        for chave in ('delta', 'g_mais', 'tol_plateau', 'tol_taxa'):
            if chave in data and not data[chave] > 0:
                raise serializers.ValidationError({chave: "Deve ser positivo."})
        return data


class GradedSerializer(serializers.Serializer):
    """Matriz M_h, partição em blocos e razões τ_k (ou seus logaritmos naturais)."""
    matriz = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    dims = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1)
    tau = serializers.ListField(child=serializers.FloatField(), required=False)
    log_tau = serializers.ListField(child=serializers.FloatField(), required=False)
    classe = serializers.ChoiceField(choices=CLASSES, default='GS')
    limite_assimetria = serializers.FloatField(min_value=0.0, default=0.0)

    def validate(self, data):
        n = sum(data['dims'])
        if len(data['matriz']) != n or any(len(linha) != n for linha in data['matriz']):
            raise serializers.ValidationError({'matriz': f"A matriz deve ser {n}×{n}."})
        if 'tau' in data and 'log_tau' in data:
            raise serializers.ValidationError("Use 'tau' ou 'log_tau', não ambos.")
        razoes = data.get('tau', data.get('log_tau', []))
        if len(razoes) != len(data['dims']) - 1:
            raise serializers.ValidationError(f"São esperados {len(data['dims']) - 1} valores de τ.")
        if 'tau' in data and any(not t > 0 for t in data['tau']):
            raise serializers.ValidationError({'tau': "Os τ_k devem ser positivos."})
        return data


# ====================================================================
# SERIALIZER PRINCIPAL
# ====================================================================

class RunConfigSerializer(serializers.Serializer):
    """
    Validação da RunConfig lida do arquivo YAML/JSON.
    Erros aqui viram código de saída 1 na CLI.
    """
    operador = OperadorSerializer(required=False)
    dominio = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        required=False, min_length=1,
    )
    malha = MalhaSerializer(required=False)
    sementes_por_eixo = serializers.IntegerField(min_value=2, required=False)
    h = serializers.ListField(child=serializers.FloatField(), required=False)
    tolerancias = ToleranciasSerializer(required=False)
    saida = serializers.CharField(required=False)
    relatorios = serializers.ListField(child=serializers.CharField(), required=False)
    caminho_geral = serializers.BooleanField(required=False)
    ordem_harmonica = serializers.IntegerField(min_value=0, max_value=6, required=False)
    faixa_razao = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2, required=False)
    escala_tolerancia = serializers.FloatField(required=False)
    regra_potencial = serializers.ChoiceField(choices=['simbolico', 'gibbs'], required=False)
    hipo = HipoSerializer(required=False)
    semigrupo = SemigrupoSerializer(required=False)
    graded = GradedSerializer(required=False)
    workers = serializers.IntegerField(min_value=1, required=False)

    def validate_h(self, valores):
        if any(not h > 0 for h in valores):
            raise serializers.ValidationError("Os valores de h devem ser positivos.")
        return valores

    def validate_dominio(self, eixos):
        for lo, hi in eixos:
            if not lo < hi:
                raise serializers.ValidationError(f"Intervalo vazio [{lo}, {hi}] no domínio.")
        return eixos

    def validate_faixa_razao(self, faixa):
        if not 0 < faixa[0] < 1 < faixa[1]:
            raise serializers.ValidationError("A faixa de razões deve conter 1: [baixo < 1 < alto].")
        return faixa

    def validate_escala_tolerancia(self, escala):
        if not escala > 0:
            raise serializers.ValidationError("A escala de tolerância deve ser positiva.")
        return escala

    def validate(self, data):
        operador = data.get('operador')
        dominio = data.get('dominio')
        if operador is None and 'graded' not in data:
            raise serializers.ValidationError("Informe 'operador' (ou 'graded' para o subcomando graded).")
        if dominio is None:
            if operador is not None and 'galeria' not in operador:
                raise serializers.ValidationError({'dominio': "O operador bruto exige o domínio."})
            return data

        d = len(dominio)
        for chave, malha in (data.get('malha') or {}).items():
            if len(malha) != d:
                raise serializers.ValidationError({'malha': f"'{chave}' deve ter {d} entradas."})
        if operador is not None and 'galeria' not in operador:
            _validar_expressao(operador['f'], d, 'f')
            if 'A0' in operador:
                if len(operador['A0']) != d or any(len(linha) != d for linha in operador['A0']):
                    raise serializers.ValidationError({'A0': f"A⁰ deve ser {d}×{d}."})
                for linha in operador['A0']:
                    for texto in linha:
                        _validar_expressao(texto, d, 'A0')
            if 'b0' in operador:
                if len(operador['b0']) != d:
                    raise serializers.ValidationError({'b0': f"b⁰ deve ter {d} componentes."})
                for texto in operador['b0']:
                    _validar_expressao(texto, d, 'b0')
            if 'c0' in operador:
                _validar_expressao(operador['c0'], d, 'c0')
        semigrupo = data.get('semigrupo') or {}
        if 'u0' in semigrupo:
            _validar_expressao(semigrupo['u0'], d, 'u0')
        return data
