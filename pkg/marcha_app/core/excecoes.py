"""
Exceções personalizadas para a aplicação de marcha.
Exceções específicas permitem mapear cada falha para um código de saída.
"""
from typing import Optional

import numpy as np

from marcha_app.core.constantes import MotivoFalhaPasso


class ExcecaoMarcha(Exception):
    """Exceção base para erros relacionados à marcha."""
    pass


class ExcecaoConfiguracao(ExcecaoMarcha):
    """Exceção relacionada a erros de configuração."""
    pass


class ExcecaoDadosInvalidos(ExcecaoMarcha):
    """Exceção para validação de dados inválidos."""
    pass


class ExcecaoMarchaInviavel(ExcecaoMarcha):
    """Nenhum conjunto de parâmetros de VHC viável a partir do chute inicial."""
    pass


class ExcecaoVhcIrregular(ExcecaoMarcha):
    """VHC não regular no intervalo de operação."""
    pass


class ExcecaoOrbitaInviavel(ExcecaoMarcha):
    """Órbita inviável para a dinâmica zero."""
    pass


class ExcecaoContatoAmbiguo(ExcecaoMarcha):
    """Contato rasante ou de saída: pé no solo subindo."""
    pass


class FalhaPasso(ExcecaoMarcha):
    """A execução híbrida não conseguiu completar o passo."""

    def __init__(
        self,
        motivo: MotivoFalhaPasso,
        tempo: Optional[float] = None,
        estado: Optional[np.ndarray] = None
    ):
        self.motivo = motivo
        self.tempo = tempo
        self.estado = estado
        detalhe = f" em t = {tempo:.6f} s" if tempo is not None else ""
        super().__init__(f"Falha de passo: {motivo.value}{detalhe}")


class ExcecaoNumerica(ExcecaoMarcha):
    """Falha numérica interna."""
    pass


class ExcecaoImpactoDegenerado(ExcecaoNumerica):
    """Configuração de impacto degenerada."""
    pass


class ExcecaoControladorIndefinido(ExcecaoNumerica):
    """Matriz de desacoplamento singular."""
    pass


class ExcecaoAltoGanhoEstagnado(ExcecaoNumerica):
    """Realimentação de alto ganho não convergiu no tempo limite."""
    pass


class ExcecaoParInestabilizavel(ExcecaoNumerica):
    """Recursão de Riccati divergiu ou malha fechada instável."""
    pass


class ExcecaoLinearizacao(ExcecaoNumerica):
    """Avaliação perturbada do mapa falhou mesmo após reduzir a perturbação."""
    pass


class ExcecaoOrbitaInconsistente(ExcecaoNumerica):
    """Ponto fixo não verificado para a órbita e a seção escolhidas."""
    pass
